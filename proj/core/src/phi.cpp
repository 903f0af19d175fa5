#include "forrelab/phi.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "forrelab/errors.hpp"
#include "forrelab/hadamard.hpp"

namespace forrelab {

namespace {

// Shared pipeline: |0..0> -> H -> (f_i, H)*; returns the final statevector.
std::vector<double> run_pipeline(const instance_tuple& t) {
  validate_tuple(t);
  const std::size_t N = t.domain_size();
  std::vector<double> v(N, 0.0);
  v[0] = 1.0;
  fwht_inplace(v);
  for (const auto& f : t.functions) {
    apply_phase_inplace(v, f);
    fwht_inplace(v);
  }
  return v;
}

}  // namespace

phi_result phi(const instance_tuple& t, bool keep_amplitudes) {
  std::vector<double> v = run_pipeline(t);
  phi_result out;
  out.phi = v[0];
  if (keep_amplitudes) out.amplitudes = std::move(v);
  return out;
}

std::vector<std::vector<double>> phi_levels(const instance_tuple& t) {
  validate_tuple(t);
  const std::size_t N = t.domain_size();
  std::vector<double> v(N, 0.0);
  v[0] = 1.0;
  fwht_inplace(v);
  std::vector<std::vector<double>> levels;
  levels.reserve(t.functions.size());
  for (const auto& f : t.functions) {
    apply_phase_inplace(v, f);
    fwht_inplace(v);
    levels.push_back(v);
  }
  return levels;
}

double phi_bruteforce(const instance_tuple& t) {
  validate_tuple(t);
  const int k = t.k();
  if (k < 1) throw value_error("phi_bruteforce requires k >= 1");
  const std::size_t N = t.domain_size();
  double configurations = 1.0;
  for (int i = 0; i < k; ++i) {
    configurations *= static_cast<double>(N);
    if (configurations > 1e7) {
      throw resource_error("phi_bruteforce guarded to N^k <= 10^7");
    }
  }

  // Odometer over (x_1, ..., x_k); the twist between consecutive arguments is
  // (-1)^(x_i . x_{i+1}).
  std::vector<std::size_t> x(k, 0);
  double sum = 0.0;
  while (true) {
    double term = t.functions[0][x[0]];
    for (int i = 1; i < k; ++i) {
      const int parity = std::popcount(x[i - 1] & x[i]) & 1;
      term *= (parity ? -1.0 : 1.0) * t.functions[i][x[i]];
    }
    sum += term;
    int pos = k - 1;
    while (pos >= 0) {
      if (++x[pos] < N) break;
      x[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  const double norm = std::pow(2.0, -0.5 * static_cast<double>(k + 1) * t.n);
  return sum * norm;
}

}  // namespace forrelab
