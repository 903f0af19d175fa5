#ifndef FORRELAB_PHI_HPP
#define FORRELAB_PHI_HPP

#include <optional>
#include <vector>

#include "forrelab/instances.hpp"

namespace forrelab {

struct phi_result {
  double phi = 0.0;
  // Final statevector; entry z is the z-shifted variant of phi in which the
  // last function picks up the extra phase (-1)^(x.z).  Present on request.
  std::optional<std::vector<double>> amplitudes;
};

// phi = entry 0 of H U_{f_k} H ... U_{f_1} H |0...0>, computed with the
// O(k N log N) butterfly pipeline.  Real-valued functions are admitted as
// general phase multipliers.
phi_result phi(const instance_tuple& t, bool keep_amplitudes = false);

// Statevectors after each complete round: A_i = H(f_i .* A_{i-1}^pre) for
// i = 1..k.  Entry A_i[x] equals the x-shifted partial forrelation of the
// first i functions; for Boolean tuples each level has unit norm.
std::vector<std::vector<double>> phi_levels(const instance_tuple& t);

// Literal nested-sum definition, the oracle for phi.  Guarded to
// N^k <= 10^7; throws resource_error beyond that.
double phi_bruteforce(const instance_tuple& t);

}  // namespace forrelab

#endif  // FORRELAB_PHI_HPP
