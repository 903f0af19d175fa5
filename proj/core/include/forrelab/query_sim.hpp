#ifndef FORRELAB_QUERY_SIM_HPP
#define FORRELAB_QUERY_SIM_HPP

#include "forrelab/instances.hpp"
#include "forrelab/rng.hpp"

namespace forrelab {

struct decision_outcome {
  double accept_probability = 0.0;
  bool accept = false;   // sampled decision
  int queries_used = 0;  // ceil(k/2) for the half-k circuit
};

// Acceptance probability (1 + phi)/2 of the halved-query circuit, computed
// from the two control branches directly: the control-0 branch runs the first
// ceil(k/2) rounds forward, the control-1 branch runs the remaining rounds in
// reverse, and the acceptance amplitude is their inner product.
double halfk_accept_probability(const instance_tuple& t);

// Cross-check path: simulates the explicit (n+1)-qubit controlled circuit on
// a 2N statevector and measures the control qubit.  Mathematically identical
// to halfk_accept_probability.
double halfk_accept_probability_controlled(const instance_tuple& t);

// Decision wrapper: rejects outright with probability 1/4 and runs the
// circuit with probability 3/4, so the acceptance probability is the affine
// map (3/8)(1 + phi).  The promise gap maps phi >= 3/5 to >= 0.6 and
// |phi| <= 1/100 to < 0.4.
decision_outcome decide(const instance_tuple& t, rng_t& rng);

}  // namespace forrelab

#endif  // FORRELAB_QUERY_SIM_HPP
