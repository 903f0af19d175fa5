#ifndef FORRELAB_BLOCKPOLY_HPP
#define FORRELAB_BLOCKPOLY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace forrelab {

// Degree-k polynomial over k blocks of variables with exactly one variable
// per block in every monomial.  The coefficient table is sparse and flat:
// term i occupies term_vars[i*k .. i*k+k-1] and term_coefs[i].
struct block_poly {
  int k = 0;
  std::vector<int> block_sizes;
  std::vector<int> term_vars;
  std::vector<double> term_coefs;

  std::size_t term_count() const { return term_coefs.size(); }
  const int* term(std::size_t i) const { return term_vars.data() + i * static_cast<std::size_t>(k); }
  void add_term(const std::vector<int>& idx, double coef);
  // Sorts terms lexicographically and merges duplicate keys (summing
  // coefficients, dropping exact zeros).
  void canonicalize();
};

// Throws shape_error/value_error if the structure is malformed.
void validate_blockpoly(const block_poly& p);

// Sum over terms of coef times the product of the selected variables;
// assignment[j] supplies the values of block j.
double evaluate(const block_poly& p, const std::vector<std::vector<double>>& assignment);

// The balance statistic for a nonempty block subset S (0-based ids): the sum
// over S-side index tuples of the squared marginal sums over the complement.
double lambda_S(const block_poly& p, const std::vector<int>& S);

// Replaces variable (block j, index l) by the average of m fresh variables.
// Every monomial through the variable becomes m monomials with the
// coefficient divided by m; the copies occupy the original slot plus m-1
// appended indices.  m = 1 is the identity.
block_poly split_variable(const block_poly& p, int block, int index, int m);

// Maps the variables of a balanced polynomial back to the originals.
struct split_trace {
  // origin[j][l] = original index of (post-split) variable l of block j, or
  // -1 for zero-coefficient padding introduced to equalize block sizes.
  std::vector<std::vector<int>> origin;
  long long new_variable_count = 0;  // variables added by splitting (padding excluded)
};

struct balance_options {
  // Materialized-term budget; exceeding it raises resource_error.
  std::size_t max_terms = 8'000'000;
  // Boundedness is spot-checked on this many random +-1 assignments before
  // splitting; an escape beyond 1 + 1e-6 raises precondition_error.
  int boundedness_samples = 64;
  std::uint64_t boundedness_seed = 0x5eedULL;
};

struct balance_result {
  block_poly poly;
  split_trace trace;
};

// Variable-splitting pass over every nonempty block subset S (ascending
// bitmask order, pivot = lowest block of S): each pivot variable with
// per-variable share V splits into floor(sqrt(V)/delta) + 1 copies, driving
// every Lambda_S to at most delta while adding at most 2^k/delta variables.
// Blocks are padded with zero-coefficient variables to a common size.
balance_result balance(const block_poly& p, double delta, const balance_options& opt = {});

// A t-query algorithm description: t+1 real orthogonal unitaries over 2^n
// basis states, a per-state map to the queried input position (-1 marks
// states that do not participate in queries), and the accepting set.
struct query_algorithm {
  int n = 0;
  int t = 0;
  int input_length = 0;                     // number of input positions
  std::vector<Eigen::MatrixXd> unitaries;   // t+1 matrices of dimension 2^n
  std::vector<int> query_index_map;         // size 2^n, entries in [-1, input_length)
  std::vector<int> accepting_states;
};

void validate_query_algorithm(const query_algorithm& a);

// Dense statevector oracle: exact acceptance probability on input X.
// States mapped to -1 read the constant 1 (the dummy's value in any normal
// run).
double acceptance_probability(const query_algorithm& a, const std::vector<double>& X);

struct extraction_result {
  block_poly poly;  // 2t blocks of equal size
  // variable_position[l] = input position behind block variable l, or -1 for
  // the dummy slot at index 0 (present only when some state maps to -1).
  std::vector<int> variable_position;
};

// Propagates per-amplitude block-multilinear polynomials through the
// algorithm (query j multiplies the amplitude of state s by the variable
// (j, position(s))) and assembles p = sum over accepting states of the
// product of two independent copies, over 2t blocks.  p(x,...,x) is the
// acceptance probability and |p| <= 1 on arbitrary +-1 assignments.
// Resource-guarded by propagation and assembly cost.
extraction_result from_query_algorithm(const query_algorithm& a);

// Per-block assignment that repeats input X across all 2t blocks, with the
// dummy slot (if present) set to 1.
std::vector<std::vector<double>> repeated_assignment(const extraction_result& ex,
                                                     const std::vector<double>& X);

}  // namespace forrelab

#endif  // FORRELAB_BLOCKPOLY_HPP
