#include "forrelab/fourier_sampling.hpp"

#include <cmath>
#include <cstddef>
#include <random>

#include "forrelab/errors.hpp"
#include "forrelab/hadamard.hpp"

namespace forrelab {

namespace {

void require_boolean_table(const std::vector<double>& f) {
  checked_log2(f.size());
  for (double v : f) {
    if (v != 1.0 && v != -1.0) {
      throw value_error("fourier sampling requires a +-1 value table");
    }
  }
}

}  // namespace

void validate_distribution(const output_distribution& d) {
  if (d.n < 0 || d.probabilities.size() != (std::size_t{1} << d.n)) {
    throw shape_error("output_distribution length must equal 2^n");
  }
  double total = 0.0;
  for (double p : d.probabilities) {
    if (!(p >= 0.0)) {
      throw value_error("output_distribution has a negative probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw value_error("output_distribution does not sum to 1");
  }
}

output_distribution exact_distribution(const std::vector<double>& f) {
  require_boolean_table(f);
  const auto N = static_cast<double>(f.size());
  output_distribution d;
  d.n = checked_log2(f.size());
  d.probabilities = fwht_raw(f);
  for (double& p : d.probabilities) {
    p = (p / N) * (p / N);
  }
  return d;
}

int quantum_sample(const std::vector<double>& f, rng_t& rng) {
  const auto d = exact_distribution(f);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double cum = 0.0;
  int last_support = 0;
  for (std::size_t y = 0; y < d.probabilities.size(); ++y) {
    if (d.probabilities[y] > 0.0) last_support = static_cast<int>(y);
    cum += d.probabilities[y];
    if (u < cum) return static_cast<int>(y);
  }
  // Rounding pushed the cumulative sum fractionally below u: return the last
  // outcome with positive probability.
  return last_support;
}

double tv_distance(const output_distribution& p, const output_distribution& q) {
  validate_distribution(p);
  validate_distribution(q);
  if (p.n != q.n) {
    throw shape_error("tv_distance requires distributions on the same domain");
  }
  double total = 0.0;
  for (std::size_t y = 0; y < p.probabilities.size(); ++y) {
    total += std::abs(p.probabilities[y] - q.probabilities[y]);
  }
  return 0.5 * total;
}

relation_result relation_solve(const std::vector<double>& f, double c,
                               relation_strategy strategy, rng_t& rng) {
  require_boolean_table(f);
  if (!(c > 0.0)) {
    throw value_error("relation threshold must be positive");
  }
  relation_result r;
  if (strategy == relation_strategy::quantum) {
    r.y = quantum_sample(f, rng);
    r.queries = 1;
  } else {
    r.y = 0;
    r.queries = 0;
  }
  const auto fhat = fwht(f);
  r.success = std::abs(fhat[static_cast<std::size_t>(r.y)]) >= c;
  return r;
}

double relation_success_exact(const std::vector<double>& f, double c) {
  if (!(c > 0.0)) {
    throw value_error("relation threshold must be positive");
  }
  const auto d = exact_distribution(f);
  const auto fhat = fwht(f);
  double total = 0.0;
  for (std::size_t y = 0; y < fhat.size(); ++y) {
    if (std::abs(fhat[y]) >= c) total += d.probabilities[y];
  }
  return total;
}

}  // namespace forrelab
