#ifndef FORRELAB_FOURIER_SAMPLING_HPP
#define FORRELAB_FOURIER_SAMPLING_HPP

#include <vector>

#include "forrelab/rng.hpp"

namespace forrelab {

// Probability distribution over {0,1}^n outcomes.
struct output_distribution {
  int n = 0;
  std::vector<double> probabilities;
};

void validate_distribution(const output_distribution& d);

// D_f[y] = (fwht_raw(f)/N)^2: the measurement distribution of H U_f H |0..0>.
// Requires a +-1 table; sums to 1 by Parseval.
output_distribution exact_distribution(const std::vector<double>& f);

// One draw from exact_distribution(f); costs a single query.
int quantum_sample(const std::vector<double>& f, rng_t& rng);

// Half the l1 distance between two distributions on the same domain.
double tv_distance(const output_distribution& p, const output_distribution& q);

enum class relation_strategy { quantum, zero_query };

struct relation_result {
  int y = 0;
  bool success = false;  // |fhat_unit(y)| >= c
  int queries = 0;
};

// Relation task: output some y with |fhat_unit(y)| >= c, where fhat_unit is
// the unitary (1/sqrt(N)) transform.  quantum draws y from D_f with one
// query; zero_query always outputs 0^n without looking at f.
relation_result relation_solve(const std::vector<double>& f, double c,
                               relation_strategy strategy, rng_t& rng);

// Exact success probability of the quantum strategy on this f:
// sum of D_f[y] over the y meeting the threshold.
double relation_success_exact(const std::vector<double>& f, double c);

}  // namespace forrelab

#endif  // FORRELAB_FOURIER_SAMPLING_HPP
