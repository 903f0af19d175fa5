#include "forrelab/hadamard.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "forrelab/errors.hpp"

namespace forrelab {

int checked_log2(std::size_t len) {
  if (len == 0 || (len & (len - 1)) != 0) {
    throw shape_error("vector length " + std::to_string(len) + " is not a power of two");
  }
  return std::countr_zero(len);
}

void fwht_raw_inplace(std::vector<double>& v) {
  (void)checked_log2(v.size());
  const std::size_t n = v.size();
  for (std::size_t h = 1; h < n; h *= 2) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j];
        const double b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

void fwht_inplace(std::vector<double>& v) {
  fwht_raw_inplace(v);
  const double scale = 1.0 / std::sqrt(static_cast<double>(v.size()));
  for (double& x : v) x *= scale;
}

std::vector<double> fwht_raw(std::vector<double> v) {
  fwht_raw_inplace(v);
  return v;
}

std::vector<double> fwht(std::vector<double> v) {
  fwht_inplace(v);
  return v;
}

void apply_phase_inplace(std::vector<double>& v, const std::vector<double>& f) {
  if (v.size() != f.size()) {
    throw shape_error("apply_phase length mismatch: " + std::to_string(v.size()) +
                      " vs " + std::to_string(f.size()));
  }
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= f[i];
}

std::vector<double> apply_phase(std::vector<double> v, const std::vector<double>& f) {
  apply_phase_inplace(v, f);
  return v;
}

std::vector<double> fwht_dense_oracle(const std::vector<double>& v) {
  const int n = checked_log2(v.size());
  if (n > 12) throw resource_error("dense Hadamard oracle guarded to n <= 12");
  const std::size_t N = v.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  std::vector<double> out(N, 0.0);
  for (std::size_t x = 0; x < N; ++x) {
    double acc = 0.0;
    for (std::size_t y = 0; y < N; ++y) {
      const int parity = std::popcount(x & y) & 1;
      acc += (parity ? -1.0 : 1.0) * v[y];
    }
    out[x] = acc * scale;
  }
  return out;
}

}  // namespace forrelab
