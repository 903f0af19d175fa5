#ifndef FORRELAB_HADAMARD_HPP
#define FORRELAB_HADAMARD_HPP

#include <cstddef>
#include <vector>

namespace forrelab {

// Universal exact-math tolerance: double precision leaves ample headroom for
// N <= 2^20 butterflies.
inline constexpr double kExactTol = 1e-12;

// Returns log2(len) if len is a power of two, otherwise throws shape_error.
int checked_log2(std::size_t len);

// In-place unnormalized Walsh-Hadamard butterfly: v <- M v with
// M[x][y] = (-1)^(x.y).  Self-inverse up to a factor of N.
void fwht_raw_inplace(std::vector<double>& v);

// In-place unitary transform: v <- H v with H[x][y] = (-1)^(x.y)/sqrt(N).
// Self-inverse and norm-preserving.
void fwht_inplace(std::vector<double>& v);

// Value-returning variants.
std::vector<double> fwht_raw(std::vector<double> v);
std::vector<double> fwht(std::vector<double> v);

// Pointwise product v[x] * f[x]; throws shape_error on length mismatch.
std::vector<double> apply_phase(std::vector<double> v, const std::vector<double>& f);
void apply_phase_inplace(std::vector<double>& v, const std::vector<double>& f);

// Dense O(N^2) Hadamard action under the unitary convention; the test oracle
// for the butterfly.  Guarded to n <= 12.
std::vector<double> fwht_dense_oracle(const std::vector<double>& v);

}  // namespace forrelab

#endif  // FORRELAB_HADAMARD_HPP
