#include "forrelab/instances.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "forrelab/errors.hpp"
#include "forrelab/hadamard.hpp"
#include "forrelab/phi.hpp"

namespace forrelab {

std::string to_string(measure_kind m) {
  return m == measure_kind::uniform ? "uniform" : "forrelated";
}

measure_kind measure_from_string(const std::string& s) {
  if (s == "uniform") return measure_kind::uniform;
  if (s == "forrelated") return measure_kind::forrelated;
  throw value_error("unknown measure '" + s + "' (expected uniform|forrelated)");
}

bool instance_tuple::is_boolean() const {
  for (const auto& f : functions) {
    for (double v : f) {
      if (v != 1.0 && v != -1.0) return false;
    }
  }
  return true;
}

void validate_tuple(const instance_tuple& t) {
  if (t.n < 0 || t.n > 30) throw shape_error("tuple qubit count out of range");
  const std::size_t N = t.domain_size();
  for (const auto& f : t.functions) {
    if (f.size() != N) {
      throw shape_error("tuple function length " + std::to_string(f.size()) +
                        " does not match 2^n = " + std::to_string(N));
    }
    for (double v : f) {
      if (!std::isfinite(v)) throw shape_error("tuple function has non-finite entry");
    }
  }
}

std::vector<double> sign_round(const std::vector<double>& values) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = values[i] >= 0.0 ? 1.0 : -1.0;
  }
  return out;
}

instance_tuple sign_round(const instance_tuple& t) {
  instance_tuple out;
  out.n = t.n;
  out.label = t.label;
  out.functions.reserve(t.functions.size());
  for (const auto& f : t.functions) out.functions.push_back(sign_round(f));
  return out;
}

namespace {

std::vector<double> gaussian_table(std::size_t N, rng_t& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> f(N);
  for (double& v : f) v = gauss(rng);
  return f;
}

std::vector<double> boolean_table(std::size_t N, rng_t& rng) {
  std::bernoulli_distribution coin(0.5);
  std::vector<double> f(N);
  for (double& v : f) v = coin(rng) ? 1.0 : -1.0;
  return f;
}

}  // namespace

instance_tuple sample_real_pair(int n, measure_kind measure, rng_t& rng) {
  if (n < 1) throw value_error("sample_real_pair requires n >= 1");
  instance_tuple t;
  t.n = n;
  t.label = measure;
  const std::size_t N = t.domain_size();
  t.functions.push_back(gaussian_table(N, rng));
  if (measure == measure_kind::uniform) {
    t.functions.push_back(gaussian_table(N, rng));
  } else {
    t.functions.push_back(fwht(t.functions[0]));
  }
  return t;
}

std::vector<double> multipliers(const std::vector<std::vector<double>>& prefix) {
  if (prefix.empty()) {
    throw value_error("multipliers requires at least one prefix function (k >= 3)");
  }
  const std::size_t N = prefix.front().size();
  instance_tuple head;
  head.n = checked_log2(N);
  head.functions = prefix;
  validate_tuple(head);
  phi_result r = phi(head, /*keep_amplitudes=*/true);
  std::vector<double> c = std::move(*r.amplitudes);
  const double scale = std::sqrt(static_cast<double>(N));
  for (double& v : c) v *= scale;
  return c;
}

instance_tuple sample_kfold_hybrid(int n, int k, measure_kind measure, rng_t& rng) {
  if (n < 1) throw value_error("sample_kfold_hybrid requires n >= 1");
  if (k < 2) throw value_error("sample_kfold_hybrid requires k >= 2");
  instance_tuple t;
  t.n = n;
  t.label = measure;
  const std::size_t N = t.domain_size();
  for (int i = 0; i < k - 2; ++i) t.functions.push_back(boolean_table(N, rng));
  t.functions.push_back(gaussian_table(N, rng));
  if (measure == measure_kind::uniform) {
    t.functions.push_back(gaussian_table(N, rng));
  } else {
    std::vector<double> twisted = t.functions[k - 2];
    if (k >= 3) {
      const std::vector<double> c = multipliers(
          std::vector<std::vector<double>>(t.functions.begin(), t.functions.end() - 1));
      apply_phase_inplace(twisted, c);
    }
    t.functions.push_back(fwht(std::move(twisted)));
  }
  return t;
}

instance_tuple corrupt(const instance_tuple& t, double eps, rng_t& rng) {
  validate_tuple(t);
  if (!(eps >= 0.0 && eps <= 1.0)) throw value_error("corrupt requires 0 <= eps <= 1");
  if (!t.is_boolean()) throw precondition_error("corrupt requires a Boolean tuple");
  const std::size_t N = t.domain_size();
  const std::size_t count =
      std::min<std::size_t>(N, static_cast<std::size_t>(std::llround(eps * static_cast<double>(N))));

  instance_tuple out;
  out.n = t.n;
  out.functions = t.functions;
  std::bernoulli_distribution coin(0.5);
  std::vector<std::size_t> positions(N);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  for (auto& f : out.functions) {
    // Partial Fisher-Yates: the first `count` entries form a uniform subset.
    for (std::size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, N - 1);
      std::swap(positions[i], positions[pick(rng)]);
      f[positions[i]] = coin(rng) ? 1.0 : -1.0;
    }
  }
  return out;
}

goodness_report check_goodness(const instance_tuple& t, const goodness_options& opt) {
  validate_tuple(t);
  if (!t.is_boolean()) throw precondition_error("check_goodness requires a Boolean tuple");
  const std::size_t N = t.domain_size();
  const double sqrtN = std::sqrt(static_cast<double>(N));
  const double log2N = static_cast<double>(t.n);
  const std::vector<std::vector<double>> levels = phi_levels(t);

  goodness_report rep;
  rep.amplitude_threshold = log2N;
  rep.balance_threshold = std::pow(log2N, 2.5) / sqrtN;

  for (const auto& level : levels) {
    for (double a : level) {
      rep.max_scaled_amplitude = std::max(rep.max_scaled_amplitude, std::abs(a) * sqrtN);
    }
  }
  // Strict comparison: a tuple sitting exactly on the envelope (e.g. the
  // constant pair at n = 2, where the level-1 vector is a basis state) is
  // reported as not good.
  rep.amplitude_ok = rep.max_scaled_amplitude < rep.amplitude_threshold;

  rep.tails_ok = true;
  for (int tail = 1; tail <= t.n; ++tail) {
    goodness_tail_row row;
    row.t = tail;
    for (const auto& level : levels) {
      std::size_t hits = 0;
      for (double a : level) {
        if (std::abs(a) * sqrtN >= static_cast<double>(tail)) ++hits;
      }
      row.observed_fraction =
          std::max(row.observed_fraction, static_cast<double>(hits) / static_cast<double>(N));
    }
    row.bound = opt.tail_constant / std::pow(static_cast<double>(tail), 0.5 * tail);
    row.ok = row.observed_fraction <= row.bound;
    rep.tails_ok = rep.tails_ok && row.ok;
    rep.tails.push_back(row);
  }

  rep.balance_deviation.assign(N, 0.0);
  for (const auto& level : levels) {
    // sum_{z: z.y=0} A[z]^2 = (W[0] + W[y]) / 2 where W is the unnormalized
    // transform of the squared amplitudes.
    std::vector<double> squared(N);
    for (std::size_t z = 0; z < N; ++z) squared[z] = level[z] * level[z];
    fwht_raw_inplace(squared);
    for (std::size_t y = 1; y < N; ++y) {
      const double half_mass = 0.5 * (squared[0] + squared[y]);
      rep.balance_deviation[y] =
          std::max(rep.balance_deviation[y], std::abs(half_mass - 0.5));
    }
  }
  for (std::size_t y = 1; y < N; ++y) {
    rep.max_balance_deviation = std::max(rep.max_balance_deviation, rep.balance_deviation[y]);
  }
  rep.balance_ok = rep.max_balance_deviation <= rep.balance_threshold;

  rep.good = rep.amplitude_ok && rep.tails_ok && rep.balance_ok;
  return rep;
}

}  // namespace forrelab
