#ifndef FORRELAB_ESTIMATORS_HPP
#define FORRELAB_ESTIMATORS_HPP

#include <optional>
#include <vector>

#include "forrelab/blockpoly.hpp"
#include "forrelab/rng.hpp"

namespace forrelab {

// Multilinear polynomial over +-1 variables: every term key is a sorted
// list of distinct variable indices (the empty key is the constant term).
struct multilinear_poly {
  int n_vars = 0;
  std::vector<std::pair<std::vector<int>, double>> terms;
};

void validate_multilinear(const multilinear_poly& p);
double evaluate(const multilinear_poly& p, const std::vector<double>& x);

struct fourier_stats_result {
  double variance = 0.0;                // sum of squared nonconstant coefficients
  std::vector<double> influences;       // per variable: mass of terms through it
};
fourier_stats_result fourier_stats(const multilinear_poly& p);

enum class estimator_mode { warmup, main };

struct estimate_options {
  estimator_mode mode = estimator_mode::main;
  int repetitions = 16;
  // Override for the mark probability (per variable in main mode, per term
  // in warmup mode); 1.0 reads everything and reproduces the exact value.
  std::optional<double> mark_probability;
  // Audit every Lambda_S against the balance threshold before estimating.
  bool audit_balance = true;
  // Explicit balance threshold for the audit; 0 derives eps^2 / (number of
  // distinct original input positions).
  double audit_delta = 0.0;
};

struct estimate_report {
  double estimate = 0.0;
  // Ceiling of the mean (over repetitions) number of distinct original
  // input positions read.
  long long queries_used = 0;
  int repetitions = 0;
  std::vector<double> per_repetition_values;
};

// Restriction sum used by the sublinear estimator: the total coefficient
// mass of terms whose variables are all marked, weighted by the assignment.
double marked_partial_sum(const block_poly& p, const std::vector<std::vector<double>>& values,
                          const std::vector<std::vector<char>>& marks);

// Sublinear estimator for a balanced block polynomial.  original_values[j]
// assigns the original (pre-split) variables of block j; trace maps
// post-split variables back to them (null = identity).  original_positions
// identifies which variables read the same input position (null = all
// distinct).  Main mode marks variables with probability n^{-1/k} and
// rescales the marked partial sum; warmup mode subsamples whole terms with
// probability 1/n.
estimate_report estimate_blockpoly(const block_poly& p,
                                   const std::vector<std::vector<double>>& original_values,
                                   double eps, rng_t& rng, const estimate_options& opt = {},
                                   const split_trace* trace = nullptr,
                                   const std::vector<std::vector<int>>* original_positions = nullptr);

// End-to-end pipeline: extract the acceptance polynomial of a query
// algorithm, balance it at delta = eps^2 / input_length, bind the input
// across all blocks, and estimate with sublinearly many input reads.
estimate_report simulate_quantum_classically(const query_algorithm& a,
                                             const std::vector<double>& X, double eps,
                                             rng_t& rng, const estimate_options& opt = {});

struct quad_options {
  double C = 4.0;                 // variance / row-statistic threshold scale
  int base_repetitions = 256;     // pilot repetitions before adapting
  int max_repetitions = 30000;
  std::optional<double> mark_probability;  // default 1/sqrt(current vars)
  std::optional<int> linear_samples;       // default 36 W^2 / eps^2
  long long split_cap_factor = 50;         // split budget = factor * n_vars
};

struct quad_report {
  double estimate = 0.0;
  long long queries_used = 0;     // distinct original variables read overall
  int repetitions = 0;            // quadratic-stage repetitions used
  double constant_part = 0.0;
  double linear_part = 0.0;
  double quadratic_part = 0.0;
  long long splits_influence_loop = 0;  // splits driven by the variance test
  long long splits_row_loop = 0;        // splits driven by the row statistic
  int variables_after = 0;
  double variance_after = 0.0;          // sum of squared pair coefficients
  double row_statistic_after = 0.0;     // sum of squared row sums
};

// Estimator for bounded quadratics: the constant stratum is read off, the
// linear stratum is importance-sampled, and the quadratic stratum is first
// tamed by variable splitting (max-influence splits while the Fourier
// variance is at least C/n, then max-row-sum splits while the row statistic
// is at least C log(n)/n) and finally estimated from variables marked with
// probability 1/sqrt(n).
quad_report estimate_quadratic(const multilinear_poly& p, const std::vector<double>& x,
                               double eps, rng_t& rng, const quad_options& opt = {});

}  // namespace forrelab

#endif  // FORRELAB_ESTIMATORS_HPP
