#include "forrelab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <unordered_map>

#include "forrelab/errors.hpp"

namespace forrelab {

void validate_multilinear(const multilinear_poly& p) {
  if (p.n_vars < 0) throw shape_error("multilinear polynomial variable count must be nonnegative");
  for (const auto& [key, coef] : p.terms) {
    for (std::size_t d = 0; d < key.size(); ++d) {
      if (key[d] < 0 || key[d] >= p.n_vars)
        throw value_error("multilinear term variable out of range");
      if (d > 0 && key[d] <= key[d - 1])
        throw value_error("multilinear term key must be sorted and duplicate-free");
    }
    if (!std::isfinite(coef)) throw value_error("multilinear coefficient must be finite");
  }
}

double evaluate(const multilinear_poly& p, const std::vector<double>& x) {
  validate_multilinear(p);
  if (x.size() != static_cast<std::size_t>(p.n_vars))
    throw shape_error("assignment length mismatch for the multilinear polynomial");
  double total = 0.0;
  for (const auto& [key, coef] : p.terms) {
    double prod = coef;
    for (int v : key) prod *= x[static_cast<std::size_t>(v)];
    total += prod;
  }
  return total;
}

fourier_stats_result fourier_stats(const multilinear_poly& p) {
  validate_multilinear(p);
  fourier_stats_result out;
  out.influences.assign(static_cast<std::size_t>(p.n_vars), 0.0);
  for (const auto& [key, coef] : p.terms) {
    const double sq = coef * coef;
    if (!key.empty()) out.variance += sq;
    for (int v : key) out.influences[static_cast<std::size_t>(v)] += sq;
  }
  return out;
}

double marked_partial_sum(const block_poly& p, const std::vector<std::vector<double>>& values,
                          const std::vector<std::vector<char>>& marks) {
  if (static_cast<int>(values.size()) != p.k || static_cast<int>(marks.size()) != p.k)
    throw shape_error("values and marks must provide one vector per block");
  double total = 0.0;
  for (std::size_t i = 0; i < p.term_count(); ++i) {
    const int* idx = p.term(i);
    bool all = true;
    for (int j = 0; j < p.k && all; ++j)
      all = marks[static_cast<std::size_t>(j)][static_cast<std::size_t>(idx[j])] != 0;
    if (!all) continue;
    double prod = p.term_coefs[i];
    for (int j = 0; j < p.k; ++j)
      prod *= values[static_cast<std::size_t>(j)][static_cast<std::size_t>(idx[j])];
    total += prod;
  }
  return total;
}

estimate_report estimate_blockpoly(const block_poly& p,
                                   const std::vector<std::vector<double>>& original_values,
                                   double eps, rng_t& rng, const estimate_options& opt,
                                   const split_trace* trace,
                                   const std::vector<std::vector<int>>* original_positions) {
  validate_blockpoly(p);
  if (!(eps > 0.0)) throw value_error("estimator accuracy must be positive");
  if (opt.repetitions < 1) throw value_error("estimator needs at least one repetition");
  const std::size_t k = static_cast<std::size_t>(p.k);
  const int n = p.block_sizes[0];
  for (int s : p.block_sizes)
    if (s != n) throw value_error("estimator requires equal (balanced) block sizes");
  if (static_cast<int>(original_values.size()) != p.k)
    throw shape_error("estimator needs one value vector per block");

  // Bind post-split variables to values and shared input positions.
  std::vector<std::vector<double>> value(k);
  std::vector<std::vector<int>> position(k);
  int universe = 0;
  {
    int base = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const auto& vals = original_values[j];
      value[j].assign(static_cast<std::size_t>(n), 1.0);
      position[j].assign(static_cast<std::size_t>(n), -1);
      for (int l = 0; l < n; ++l) {
        int org = l;
        if (trace) {
          if (trace->origin.size() != k ||
              trace->origin[j].size() != static_cast<std::size_t>(n))
            throw shape_error("split trace shape mismatch with the polynomial");
          org = trace->origin[j][static_cast<std::size_t>(l)];
        }
        if (org < 0) continue;  // zero-coefficient padding
        if (static_cast<std::size_t>(org) >= vals.size())
          throw shape_error("original value vector too short for the split trace");
        value[j][static_cast<std::size_t>(l)] = vals[static_cast<std::size_t>(org)];
        int pos;
        if (original_positions) {
          const auto& pj = (*original_positions)[j];
          if (static_cast<std::size_t>(org) >= pj.size())
            throw shape_error("original position vector too short");
          pos = pj[static_cast<std::size_t>(org)];
        } else {
          pos = base + org;
        }
        position[j][static_cast<std::size_t>(l)] = pos;
        universe = std::max(universe, pos + 1);
      }
      base += static_cast<int>(vals.size());
    }
  }

  if (opt.audit_balance) {
    const double delta =
        opt.audit_delta > 0.0 ? opt.audit_delta
                              : eps * eps / static_cast<double>(std::max(universe, 1));
    for (unsigned mask = 1; mask < (1u << p.k); ++mask) {
      std::vector<int> S;
      for (int j = 0; j < p.k; ++j)
        if (mask & (1u << j)) S.push_back(j);
      if (lambda_S(p, S) > delta * (1.0 + 1e-9))
        throw precondition_error("polynomial is not balanced at the required threshold");
    }
  }

  estimate_report report;
  report.repetitions = opt.repetitions;
  report.per_repetition_values.reserve(static_cast<std::size_t>(opt.repetitions));

  std::vector<char> seen(static_cast<std::size_t>(std::max(universe, 1)), 0);
  std::vector<int> touched;
  double query_total = 0.0;

  if (opt.mode == estimator_mode::main) {
    double q = opt.mark_probability.value_or(std::pow(static_cast<double>(n), -1.0 / p.k));
    if (!(q > 0.0 && q <= 1.0)) throw value_error("mark probability must lie in (0, 1]");
    std::bernoulli_distribution coin(q);
    const double scale = std::pow(q, -static_cast<double>(p.k));
    std::vector<std::vector<char>> marks(k, std::vector<char>(static_cast<std::size_t>(n), 0));
    for (int rep = 0; rep < opt.repetitions; ++rep) {
      touched.clear();
      for (std::size_t j = 0; j < k; ++j)
        for (int l = 0; l < n; ++l) {
          const bool m = coin(rng);
          marks[j][static_cast<std::size_t>(l)] = m ? 1 : 0;
          const int pos = position[j][static_cast<std::size_t>(l)];
          if (m && pos >= 0 && !seen[static_cast<std::size_t>(pos)]) {
            seen[static_cast<std::size_t>(pos)] = 1;
            touched.push_back(pos);
          }
        }
      const double P = marked_partial_sum(p, value, marks);
      report.per_repetition_values.push_back(P * scale);
      query_total += static_cast<double>(touched.size());
      for (int pos : touched) seen[static_cast<std::size_t>(pos)] = 0;
    }
  } else {
    double q = opt.mark_probability.value_or(1.0 / static_cast<double>(n));
    if (!(q > 0.0 && q <= 1.0)) throw value_error("mark probability must lie in (0, 1]");
    std::bernoulli_distribution coin(q);
    for (int rep = 0; rep < opt.repetitions; ++rep) {
      touched.clear();
      double P = 0.0;
      for (std::size_t i = 0; i < p.term_count(); ++i) {
        if (!coin(rng)) continue;
        const int* idx = p.term(i);
        double prod = p.term_coefs[i];
        for (std::size_t j = 0; j < k; ++j) {
          prod *= value[j][static_cast<std::size_t>(idx[j])];
          const int pos = position[j][static_cast<std::size_t>(idx[j])];
          if (pos >= 0 && !seen[static_cast<std::size_t>(pos)]) {
            seen[static_cast<std::size_t>(pos)] = 1;
            touched.push_back(pos);
          }
        }
        P += prod;
      }
      report.per_repetition_values.push_back(P / q);
      query_total += static_cast<double>(touched.size());
      for (int pos : touched) seen[static_cast<std::size_t>(pos)] = 0;
    }
  }

  double mean = 0.0;
  for (double v : report.per_repetition_values) mean += v;
  mean /= static_cast<double>(opt.repetitions);
  report.estimate = mean;
  report.queries_used =
      static_cast<long long>(std::ceil(query_total / static_cast<double>(opt.repetitions)));
  return report;
}

estimate_report simulate_quantum_classically(const query_algorithm& a,
                                             const std::vector<double>& X, double eps,
                                             rng_t& rng, const estimate_options& opt) {
  if (!(eps > 0.0)) throw value_error("estimator accuracy must be positive");
  const extraction_result ex = from_query_algorithm(a);
  const double delta = eps * eps / static_cast<double>(a.input_length);
  const balance_result bal = balance(ex.poly, delta);

  const auto assignment = repeated_assignment(ex, X);
  std::vector<std::vector<int>> positions(static_cast<std::size_t>(ex.poly.k),
                                          ex.variable_position);
  estimate_options local = opt;
  if (local.audit_delta <= 0.0) local.audit_delta = delta;
  return estimate_blockpoly(bal.poly, assignment, eps, rng, local, &bal.trace, &positions);
}

namespace {

struct quad_edge {
  int u, v;
  double coef;
};

constexpr std::uint64_t pair_key(int u, int v) {
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
}

}  // namespace

quad_report estimate_quadratic(const multilinear_poly& p, const std::vector<double>& x,
                               double eps, rng_t& rng, const quad_options& opt) {
  validate_multilinear(p);
  if (x.size() != static_cast<std::size_t>(p.n_vars))
    throw shape_error("assignment length mismatch for the quadratic estimator");
  if (!(eps > 0.0)) throw value_error("estimator accuracy must be positive");
  if (!(opt.C > 0.0)) throw value_error("threshold scale must be positive");

  quad_report out;
  std::vector<char> read(static_cast<std::size_t>(p.n_vars), 0);
  auto touch = [&](int orig) {
    if (!read[static_cast<std::size_t>(orig)]) {
      read[static_cast<std::size_t>(orig)] = 1;
      ++out.queries_used;
    }
  };

  // Strata: constant, linear, pairs.  Anything of higher degree is out of
  // scope for this estimator.
  std::vector<std::pair<int, double>> linear;
  std::vector<quad_edge> edges;
  for (const auto& [key, coef] : p.terms) {
    if (key.size() > 2) throw value_error("quadratic estimator requires degree at most 2");
    if (key.empty())
      out.constant_part += coef;
    else if (key.size() == 1)
      linear.emplace_back(key[0], coef);
    else
      edges.push_back({key[0], key[1], coef});
  }

  // Linear stratum: importance sampling proportional to |coefficient|.
  double W = 0.0;
  for (const auto& [i, c] : linear) W += std::abs(c);
  if (W > 0.0) {
    std::vector<double> weights;
    weights.reserve(linear.size());
    for (const auto& [i, c] : linear) weights.push_back(std::abs(c));
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    const int T = opt.linear_samples.value_or(
        static_cast<int>(std::ceil(36.0 * W * W / (eps * eps))));
    double acc = 0.0;
    for (int s = 0; s < std::max(T, 1); ++s) {
      const auto& [i, c] = linear[pick(rng)];
      touch(i);
      acc += (c >= 0.0 ? 1.0 : -1.0) * x[static_cast<std::size_t>(i)];
    }
    out.linear_part = W * acc / static_cast<double>(std::max(T, 1));
  }

  // Quadratic stratum: split variables until both the Fourier variance and
  // the row statistic are below their thresholds, then subsample marks.
  int n_cur = p.n_vars;
  std::vector<int> orig_of(static_cast<std::size_t>(p.n_vars));
  std::iota(orig_of.begin(), orig_of.end(), 0);
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(p.n_vars));
  std::vector<double> inf(static_cast<std::size_t>(p.n_vars), 0.0);
  std::vector<double> rowsum(static_cast<std::size_t>(p.n_vars), 0.0);
  double variance = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    adj[static_cast<std::size_t>(edges[e].u)].push_back(static_cast<int>(e));
    adj[static_cast<std::size_t>(edges[e].v)].push_back(static_cast<int>(e));
    const double sq = edges[e].coef * edges[e].coef;
    variance += sq;
    inf[static_cast<std::size_t>(edges[e].u)] += sq;
    inf[static_cast<std::size_t>(edges[e].v)] += sq;
    rowsum[static_cast<std::size_t>(edges[e].u)] += edges[e].coef;
    rowsum[static_cast<std::size_t>(edges[e].v)] += edges[e].coef;
  }
  auto row_statistic = [&]() {
    double V = 0.0;
    for (int i = 0; i < n_cur; ++i) V += rowsum[static_cast<std::size_t>(i)] * rowsum[static_cast<std::size_t>(i)];
    return V;
  };

  const long long split_cap = opt.split_cap_factor * std::max(p.n_vars, 1);
  auto split = [&](int i) {
    const int fresh = n_cur++;
    orig_of.push_back(orig_of[static_cast<std::size_t>(i)]);
    adj.emplace_back();
    inf.push_back(0.0);
    rowsum.push_back(rowsum[static_cast<std::size_t>(i)] / 2.0);
    rowsum[static_cast<std::size_t>(i)] /= 2.0;
    double inf_new = 0.0;
    auto& ai = adj[static_cast<std::size_t>(i)];
    const std::size_t deg = ai.size();
    for (std::size_t d = 0; d < deg; ++d) {
      const int e = ai[d];
      auto& edge = edges[static_cast<std::size_t>(e)];
      const int other = edge.u == i ? edge.v : edge.u;
      const double old = edge.coef;
      edge.coef = old / 2.0;
      quad_edge clone{std::min(fresh, other), std::max(fresh, other), old / 2.0};
      edges.push_back(clone);
      const int eid = static_cast<int>(edges.size()) - 1;
      adj[static_cast<std::size_t>(fresh)].push_back(eid);
      adj[static_cast<std::size_t>(other)].push_back(eid);
      // The neighbor's mass through this pair drops from old^2 to old^2/2.
      inf[static_cast<std::size_t>(other)] -= old * old / 2.0;
      inf_new += old * old / 4.0;
      variance -= old * old / 2.0;
    }
    inf[static_cast<std::size_t>(i)] = inf_new;
    inf[static_cast<std::size_t>(fresh)] = inf_new;
  };

  long long total_splits = 0;
  while (true) {
    bool acted = false;
    while (variance >= opt.C / static_cast<double>(n_cur)) {
      int best = 0;
      for (int i = 1; i < n_cur; ++i)
        if (inf[static_cast<std::size_t>(i)] > inf[static_cast<std::size_t>(best)]) best = i;
      split(best);
      ++out.splits_influence_loop;
      acted = true;
      if (++total_splits > split_cap)
        throw diagnostic_error("quadratic estimator exceeded its splitting budget");
    }
    while (row_statistic() >=
           opt.C * std::log(static_cast<double>(n_cur)) / static_cast<double>(n_cur)) {
      int best = 0;
      double best_sq = -1.0;
      for (int i = 0; i < n_cur; ++i) {
        const double sq = rowsum[static_cast<std::size_t>(i)] * rowsum[static_cast<std::size_t>(i)];
        if (sq > best_sq) {
          best_sq = sq;
          best = i;
        }
      }
      split(best);
      ++out.splits_row_loop;
      acted = true;
      if (++total_splits > split_cap)
        throw diagnostic_error("quadratic estimator exceeded its splitting budget");
    }
    if (!acted) break;
  }
  out.variables_after = n_cur;
  out.variance_after = variance;
  out.row_statistic_after = row_statistic();

  // Mark-and-rescale sampling of the tamed pair table.
  double quad_mean = 0.0;
  if (!edges.empty()) {
    std::unordered_map<std::uint64_t, double> table;
    table.reserve(edges.size() * 2);
    for (const auto& e : edges) table[pair_key(e.u, e.v)] += e.coef;
    const double q =
        opt.mark_probability.value_or(1.0 / std::sqrt(static_cast<double>(n_cur)));
    if (!(q > 0.0 && q <= 1.0)) throw value_error("mark probability must lie in (0, 1]");
    std::bernoulli_distribution coin(q);
    std::vector<int> marked;
    std::vector<double> reps;
    reps.reserve(static_cast<std::size_t>(opt.base_repetitions));
    auto run_rep = [&]() {
      marked.clear();
      for (int i = 0; i < n_cur; ++i)
        if (coin(rng)) {
          marked.push_back(i);
          touch(orig_of[static_cast<std::size_t>(i)]);
        }
      double P = 0.0;
      for (std::size_t a = 0; a < marked.size(); ++a)
        for (std::size_t b = a + 1; b < marked.size(); ++b) {
          const auto it = table.find(pair_key(marked[a], marked[b]));
          if (it == table.end()) continue;
          P += it->second * x[static_cast<std::size_t>(orig_of[static_cast<std::size_t>(marked[a])])] *
               x[static_cast<std::size_t>(orig_of[static_cast<std::size_t>(marked[b])])];
        }
      reps.push_back(P / (q * q));
    };
    const int pilot = std::min(opt.base_repetitions, opt.max_repetitions);
    for (int r = 0; r < pilot; ++r) run_rep();
    double mean = 0.0, m2 = 0.0;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const double d = reps[r] - mean;
      mean += d / static_cast<double>(r + 1);
      m2 += d * (reps[r] - mean);
    }
    const double sample_var = reps.size() > 1 ? m2 / static_cast<double>(reps.size() - 1) : 0.0;
    const int target = static_cast<int>(std::min<double>(
        opt.max_repetitions,
        std::max<double>(pilot, std::ceil(36.0 * sample_var / (eps * eps)))));
    for (int r = pilot; r < target; ++r) run_rep();
    for (double v : reps) quad_mean += v;
    quad_mean /= static_cast<double>(reps.size());
    out.repetitions = static_cast<int>(reps.size());
  }
  out.quadratic_part = quad_mean;
  out.estimate = out.constant_part + out.linear_part + out.quadratic_part;
  return out;
}

}  // namespace forrelab
