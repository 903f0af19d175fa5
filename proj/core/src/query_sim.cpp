#include "forrelab/query_sim.hpp"

#include <cmath>
#include <vector>

#include "forrelab/errors.hpp"
#include "forrelab/hadamard.hpp"

namespace forrelab {

namespace {

// Control-0 branch: H, then rounds 1..m forward (phase then H), except that
// the last forward round keeps its phase without a trailing H.  The missing
// layer is supplied by the backward branch, so the inner product of the two
// branches assembles the full alternating circuit with exactly k+1 Hadamard
// layers.
std::vector<double> forward_branch(const instance_tuple& t, int m) {
  std::vector<double> v(t.domain_size(), 0.0);
  v[0] = 1.0;
  fwht_inplace(v);
  for (int i = 1; i <= m; ++i) {
    apply_phase_inplace(v, t.functions[static_cast<std::size_t>(i - 1)]);
    if (i < m) fwht_inplace(v);
  }
  return v;
}

// Control-1 branch: H, then rounds k..m+1 backward, each phase followed by
// an H.  Because the phases and transforms are real and symmetric, this
// vector transposes into the tail of the circuit.
std::vector<double> backward_branch(const instance_tuple& t, int m) {
  const int k = t.k();
  std::vector<double> v(t.domain_size(), 0.0);
  v[0] = 1.0;
  fwht_inplace(v);
  for (int i = k; i > m; --i) {
    apply_phase_inplace(v, t.functions[static_cast<std::size_t>(i - 1)]);
    fwht_inplace(v);
  }
  return v;
}

}  // namespace

double halfk_accept_probability(const instance_tuple& t) {
  validate_tuple(t);
  if (t.k() < 1) throw value_error("halfk_accept_probability requires k >= 1");
  const int m = (t.k() + 1) / 2;
  const std::vector<double> b0 = forward_branch(t, m);
  const std::vector<double> b1 = backward_branch(t, m);
  double inner = 0.0;
  for (std::size_t x = 0; x < b0.size(); ++x) inner += b1[x] * b0[x];
  return 0.5 * (1.0 + inner);
}

double halfk_accept_probability_controlled(const instance_tuple& t) {
  validate_tuple(t);
  const int k = t.k();
  if (k < 1) throw value_error("halfk_accept_probability requires k >= 1");
  const int m = (k + 1) / 2;
  const std::size_t N = t.domain_size();

  // Statevector over control (+) data: index c*N + x.
  std::vector<double> v(2 * N, 0.0);
  v[0] = 1.0;
  // H on the control.
  auto control_h = [&]() {
    const double r = 1.0 / std::sqrt(2.0);
    for (std::size_t x = 0; x < N; ++x) {
      const double a = v[x];
      const double b = v[N + x];
      v[x] = r * (a + b);
      v[N + x] = r * (a - b);
    }
  };
  auto block_fwht = [&](std::size_t block) {
    std::vector<double> tmp(v.begin() + block * N, v.begin() + (block + 1) * N);
    fwht_inplace(tmp);
    std::copy(tmp.begin(), tmp.end(), v.begin() + block * N);
  };
  auto block_phase = [&](std::size_t block, const std::vector<double>& f) {
    for (std::size_t x = 0; x < N; ++x) v[block * N + x] *= f[x];
  };

  control_h();
  block_fwht(0);
  block_fwht(1);
  for (int i = 1; i <= m; ++i) {
    block_phase(0, t.functions[static_cast<std::size_t>(i - 1)]);
    if (i < m) block_fwht(0);
  }
  for (int i = k; i > m; --i) {
    block_phase(1, t.functions[static_cast<std::size_t>(i - 1)]);
    block_fwht(1);
  }
  control_h();

  double p0 = 0.0;
  for (std::size_t x = 0; x < N; ++x) p0 += v[x] * v[x];
  return p0;
}

decision_outcome decide(const instance_tuple& t, rng_t& rng) {
  decision_outcome out;
  out.accept_probability = 0.75 * halfk_accept_probability(t);
  out.queries_used = (t.k() + 1) / 2;
  if (out.accept_probability < -1e-9 || out.accept_probability > 1.0 + 1e-9) {
    throw value_error("decide: acceptance probability escaped [0,1]; input is not a promise instance");
  }
  const double p = std::min(1.0, std::max(0.0, out.accept_probability));
  std::bernoulli_distribution flip(p);
  out.accept = flip(rng);
  return out;
}

}  // namespace forrelab
