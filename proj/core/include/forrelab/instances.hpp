#ifndef FORRELAB_INSTANCES_HPP
#define FORRELAB_INSTANCES_HPP

#include <optional>
#include <string>
#include <vector>

#include "forrelab/rng.hpp"

namespace forrelab {

enum class measure_kind { uniform, forrelated };

std::string to_string(measure_kind m);
measure_kind measure_from_string(const std::string& s);

// A k-tuple of functions on {0,1}^n, each stored as a dense length-2^n value
// table.  Boolean functions hold exactly +-1 entries; real-valued functions
// hold arbitrary finite reals.  `label` records the generating measure when
// the tuple came from a sampler.
struct instance_tuple {
  int n = 0;
  std::vector<std::vector<double>> functions;
  std::optional<measure_kind> label;

  int k() const { return static_cast<int>(functions.size()); }
  std::size_t domain_size() const { return std::size_t{1} << n; }
  bool is_boolean() const;
};

// Throws shape_error unless all functions share length 2^n with n >= 0.
void validate_tuple(const instance_tuple& t);

// Entrywise sign with sign(0) := +1.
std::vector<double> sign_round(const std::vector<double>& values);
instance_tuple sign_round(const instance_tuple& t);

// Pair sampler: uniform = 2N iid standard Gaussians; forrelated = f iid
// Gaussian and g exactly its unitary Hadamard transform.
instance_tuple sample_real_pair(int n, measure_kind measure, rng_t& rng);

// Multiplier vector c with c[x] = sqrt(N) * (final statevector of the
// (k-2)-function pipeline)[x]; satisfies sum c^2 = N.  `prefix` holds the
// k-2 Boolean tables; throws value_error when empty (k < 3).
std::vector<double> multipliers(const std::vector<std::vector<double>>& prefix);

// Hybrid sampler: f_1..f_{k-2} uniform +-1 tables; uniform case draws
// f_{k-1}, f_k iid Gaussian; forrelated case draws f_{k-1} iid Gaussian and
// sets f_k = H(c .* f_{k-1}) with c = multipliers(prefix).  k = 2 reduces to
// sample_real_pair.
instance_tuple sample_kfold_hybrid(int n, int k, measure_kind measure, rng_t& rng);

// Per function, a uniformly random subset of round(eps * 2^n) distinct
// positions is re-randomized to uniform +-1 (a redrawn value may equal the
// old one).  Requires a Boolean tuple; the returned tuple carries no label.
instance_tuple corrupt(const instance_tuple& t, double eps, rng_t& rng);

struct goodness_options {
  // The tail bound compares tail fractions against tail_constant / t^(t/2);
  // the source of the bound leaves this constant free.
  double tail_constant = 10.0;
};

struct goodness_tail_row {
  int t = 0;
  double observed_fraction = 0.0;  // max over levels of Pr_x[|A_i[x]| sqrt(N) >= t]
  double bound = 0.0;              // tail_constant / t^(t/2)
  bool ok = false;
};

// Concentration report over the per-level statevectors A_1..A_k, where
// A_i[x] is the x-shifted partial forrelation after i rounds.
struct goodness_report {
  double max_scaled_amplitude = 0.0;   // max_{i,x} |A_i[x]| * sqrt(N)
  double amplitude_threshold = 0.0;    // log2(N); pass requires strict <
  bool amplitude_ok = false;
  std::vector<goodness_tail_row> tails;  // t = 1 .. floor(log2 N)
  bool tails_ok = false;
  // Per y != 0: max over levels i of |sum_{z: z.y=0} A_i[z]^2 - 1/2|.
  std::vector<double> balance_deviation;  // indexed by y, entry 0 unused (0)
  double max_balance_deviation = 0.0;     // over y != 0
  double balance_threshold = 0.0;         // log2(N)^(5/2) / sqrt(N)
  bool balance_ok = false;
  bool good = false;
};

goodness_report check_goodness(const instance_tuple& t, const goodness_options& opt = {});

}  // namespace forrelab

#endif  // FORRELAB_INSTANCES_HPP
