#ifndef FORRELAB_RNG_HPP
#define FORRELAB_RNG_HPP

#include <cstdint>
#include <random>

namespace forrelab {

using rng_t = std::mt19937_64;

// Counter-based seed derivation: a pure function of (master, index) so that
// trial scheduling can never change results.  Uses the splitmix64 finalizer,
// which is a bijective avalanche mix on 64-bit words.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline rng_t make_rng(std::uint64_t seed) { return rng_t(seed); }

// Independent stream for trial `index` under a master seed.
inline rng_t derive_rng(std::uint64_t master, std::uint64_t index) {
  return rng_t(derive_seed(master, index));
}

}  // namespace forrelab

#endif  // FORRELAB_RNG_HPP
