#ifndef FORRELAB_GAUSSIAN_LAB_HPP
#define FORRELAB_GAUSSIAN_LAB_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "forrelab/instances.hpp"
#include "forrelab/rng.hpp"

namespace forrelab {

// Implicit family of 2N unit test vectors in R^N (N = 2^n): ids 0..N-1 are
// the standard basis e_x, ids N..2N-1 are psi_y = (1/sqrt(N)) sum_x c_x
// (-1)^{x.y} e_x.  All-ones multipliers make the second family the Hadamard
// basis.  Vectors are never materialized for bulk work; inner products come
// from closed forms over precomputed transforms.
struct test_vector_set {
  int n = 0;
  std::vector<double> multipliers;   // c, with sum c^2 = N
  double epsilon_bound = 0.0;        // exact max pairwise |<v|w>|, i != j
  std::vector<double> psi_gram;      // <psi_y|psi_z> = psi_gram[y xor z]

  std::size_t dim() const { return std::size_t{1} << n; }
  std::size_t count() const { return 2 * dim(); }
};

// Standard basis plus Hadamard basis; epsilon_bound = 1/sqrt(N).
test_vector_set make_forrelation_vectors(int n);

// Standard basis plus the multiplier family; c must have power-of-two length
// 2^n with n <= 14 and sum c^2 = N.
test_vector_set make_kfold_vectors(const std::vector<double>& c);

double inner_product(const test_vector_set& vs, int i, int j);
std::vector<double> materialize_vector(const test_vector_set& vs, int i);

// Response oracle.  uniform: every response is a fresh N(0,1) draw.
// forrelated: a hidden psi ~ N(0,1)^N is drawn once and every response is
// <v|psi>.  Repeated ids are rejected (value_error).
struct gaussian_oracle {
  test_vector_set vectors;
  measure_kind which = measure_kind::uniform;
  std::vector<double> hidden;        // psi (forrelated case only)
  std::vector<double> hidden_psi;    // precomputed <psi_y|hidden> responses
  std::vector<char> queried;
};

gaussian_oracle make_oracle(const test_vector_set& vs, measure_kind which,
                            rng_t& rng);
double respond(gaussian_oracle& oracle, int vector_id, rng_t& rng);

// Incremental Gram-Schmidt transcript over queried vectors: w_i is the
// normalized projection of v_i off the span of the earlier queries, and for
// responses a_i,
//   b_i = beta_i (a_i - sum_j <v_i|w_j> b_j)   (so Delta_F = sum b^2)
//   c_i = a_i - sum_j <v_i|w_j> c_j            (normalization-free variant)
//   r_i = a_i - c_i                            (prediction from earlier data)
struct transcript {
  test_vector_set vectors;
  std::vector<int> ids;
  std::vector<double> responses;
  std::vector<double> betas, bs, cs, rs;
  std::vector<std::vector<double>> v_dot_w;  // row i: <v_i|w_j> for j < i
  std::vector<std::vector<double>> w_coefs;  // row j: w_j over v_{ids[0..j]}
  double delta_u = 0.0;
  double delta_f = 0.0;
  double delta_f_prime = 0.0;

  std::size_t size() const { return ids.size(); }
};

transcript make_transcript(const test_vector_set& vs);

struct delta_report {
  double delta_u = 0.0;
  double delta_f = 0.0;        // sum b^2: min squared norm meeting the data
  double delta = 0.0;          // delta_u - delta_f
  double delta_prime = 0.0;    // delta_u - sum c^2
  double likelihood_ratio = 1.0;  // exp(delta/2), exponent clamped to +-700
  bool well_behaved = true;    // all |a_i| <= sqrt(2 ln(100 t))
};

delta_report summarize(const transcript& tr);

// Projection of a candidate onto the queried span: `determined` is the
// response forced by the data if the vector is dependent, `prediction` the
// conditional-mean estimate sum_j <v|w_j> c_j, and residual_norm2 = <z|z>.
struct query_projection {
  double determined = 0.0;
  double prediction = 0.0;
  double residual_norm2 = 1.0;
  std::vector<double> d;  // <v|w_j>
};

query_projection project_query(const transcript& tr, int vector_id);

// Appends one (query, response) pair.  Throws value_error on a repeated id
// and degenerate_query_error when the vector lies in the span of the earlier
// queries (<z|z> <= 1e-12): the response is already determined.
delta_report gs_update(transcript& tr, int vector_id, double response);

enum class query_strategy { random_order, alternating, likelihood_greedy };

std::string to_string(query_strategy s);
query_strategy strategy_from_string(const std::string& s);

struct episode_result {
  measure_kind truth = measure_kind::uniform;
  double log_likelihood_ratio = 0.0;
  bool guess_structured = false;
  bool decisive = false;  // settled by a span-dependent query's consistency
  double delta_u = 0.0;
  double delta_f = 0.0;
  int queries = 0;
};

// One distinguishing episode with a t-query budget.  A dependent query is
// decided by consistency (the structured case always matches the determined
// response; the uniform case almost surely does not) and clamps the log
// likelihood ratio to +-500.  When t covers the whole set, the episode uses
// the closed form: reconstruct the hidden vector from the standard-basis
// responses and check the second family against it.
episode_result run_episode(const test_vector_set& vs, query_strategy strategy,
                           int t, measure_kind truth, rng_t& rng);

struct bias_report {
  int trials_per_case = 0;
  double rate_structured = 0.0;    // Pr[guess structured | structured]
  double rate_independent = 0.0;   // Pr[guess structured | uniform]
  double bias = 0.0;               // |difference|
  double standard_error = 0.0;     // binomial, for the difference
};

bias_report run_distinguisher(const test_vector_set& vs,
                              query_strategy strategy, int t, int trials,
                              rng_t& rng);

}  // namespace forrelab

#endif  // FORRELAB_GAUSSIAN_LAB_HPP
