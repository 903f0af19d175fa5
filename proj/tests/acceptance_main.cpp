// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Tolerances and trial counts are pinned here on purpose; do not loosen them
// to make a run pass.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "forrelab/blockpoly.hpp"
#include "forrelab/bqp_compiler.hpp"
#include "forrelab/estimators.hpp"
#include "forrelab/fourier_sampling.hpp"
#include "forrelab/gaussian_lab.hpp"
#include "forrelab/instances.hpp"
#include "forrelab/phi.hpp"
#include "forrelab/query_sim.hpp"
#include "forrelab/rng.hpp"
#include "test_util.hpp"

using namespace forrelab;

namespace {

struct outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

double sample_mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
  const double m = sample_mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

Eigen::MatrixXd random_orthogonal(int N, rng_t& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd M(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) M(i, j) = gauss(rng);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(M).householderQ();
}

query_algorithm random_algorithm(int n, int t, bool with_gaps, rng_t& rng) {
  query_algorithm a;
  a.n = n;
  a.t = t;
  a.input_length = 1 << n;
  for (int q = 0; q <= t; ++q) a.unitaries.push_back(random_orthogonal(1 << n, rng));
  std::uniform_int_distribution<int> pos(with_gaps ? -1 : 0, a.input_length - 1);
  a.query_index_map.resize(std::size_t{1} << n);
  for (auto& v : a.query_index_map) v = pos(rng);
  std::bernoulli_distribution coin(0.5);
  for (int s = 0; s < (1 << n); ++s)
    if (coin(rng)) a.accepting_states.push_back(s);
  if (a.accepting_states.empty()) a.accepting_states.push_back(0);
  return a;
}

// 1. Pipeline amplitude agrees with the nested-sum oracle.
outcome criterion_phi_oracle() {
  const auto start = std::chrono::steady_clock::now();
  rng_t rng = make_rng(101);
  double max_diff = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 3;
    const int k = 1 + (trial / 3) % 3;
    const auto t = testutil::random_boolean_tuple(n, k, rng);
    max_diff = std::max(max_diff, std::abs(phi(t).phi - phi_bruteforce(t)));
  }
  const double elapsed = seconds_since(start);
  return {max_diff <= 1e-12 && elapsed < 10.0,
          "max |phi - brute| = " + num(max_diff) + " over 200 tuples (n<=3, k<=3), " +
              num(elapsed) + "s"};
}

// 2. |phi| <= 1 and the shifted amplitudes have unit total mass.
outcome criterion_unitarity() {
  rng_t rng = make_rng(102);
  double worst_norm = 0.0;
  double worst_phi = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 10;
    const int k = 1 + (trial / 10) % 4;
    const auto t = testutil::random_boolean_tuple(n, k, rng);
    const auto r = phi(t, true);
    worst_phi = std::max(worst_phi, std::abs(r.phi));
    double mass = 0.0;
    for (double a : *r.amplitudes) mass += a * a;
    worst_norm = std::max(worst_norm, std::abs(mass - 1.0));
  }
  return {worst_phi <= 1.0 + 1e-12 && worst_norm <= 1e-9,
          "max |phi| = " + num(worst_phi) + ", max |sum amp^2 - 1| = " + num(worst_norm) +
              " over 500 tuples (n<=10, k<=4)"};
}

// 3. Sign-rounded forrelated pairs average near 2/pi; k=3 hybrids nearby.
outcome criterion_rounding_constant() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> pair_phis, hybrid_phis;
  for (int trial = 0; trial < 2000; ++trial) {
    auto rng = derive_rng(103, static_cast<std::uint64_t>(trial));
    pair_phis.push_back(phi(sign_round(sample_real_pair(10, measure_kind::forrelated, rng))).phi);
    hybrid_phis.push_back(
        phi(sign_round(sample_kfold_hybrid(10, 3, measure_kind::forrelated, rng))).phi);
  }
  const double pair_mean = sample_mean(pair_phis);
  const double hybrid_mean = sample_mean(hybrid_phis);
  const double elapsed = seconds_since(start);
  const bool pass = pair_mean >= 0.60 && pair_mean <= 0.67 && hybrid_mean >= 0.58 &&
                    hybrid_mean <= 0.68 && elapsed < 60.0;
  return {pass, "pair mean = " + num(pair_mean) + " in [0.60,0.67], k=3 mean = " +
                    num(hybrid_mean) + " in [0.58,0.68], 2000 trials each, " + num(elapsed) + "s"};
}

// 4. Uniform pairs: mean phi^2 tracks 1/N.
outcome criterion_uniform_moment() {
  const int N = 256;
  std::vector<double> sq;
  for (int trial = 0; trial < 5000; ++trial) {
    auto rng = derive_rng(104, static_cast<std::uint64_t>(trial));
    const auto t = testutil::random_boolean_tuple(8, 2, rng);
    const double v = phi(t).phi;
    sq.push_back(v * v);
  }
  const double mean = sample_mean(sq);
  return {mean >= 0.7 / N && mean <= 1.3 / N,
          "mean phi^2 = " + num(mean) + " vs 1/N = " + num(1.0 / N) +
              ", window [0.7/N, 1.3/N], 5000 uniform pairs at n=8"};
}

// 5. Halved-query circuit: acceptance identity and the decision gap.
outcome criterion_query_thresholds() {
  rng_t rng = make_rng(105);
  double max_dev = 0.0;
  for (int k = 1; k <= 6; ++k) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto t = testutil::random_boolean_tuple(3, k, rng);
      max_dev = std::max(max_dev,
                         std::abs(halfk_accept_probability(t) - 0.5 * (1.0 + phi(t).phi)));
    }
  }
  auto constant_tuple = [](double c) {
    instance_tuple t;
    t.n = 3;
    t.functions = {std::vector<double>(8, c)};
    return t;
  };
  const double at_promise = decide(constant_tuple(0.6), rng).accept_probability;
  const double null_hi = decide(constant_tuple(0.01), rng).accept_probability;
  const double null_lo = decide(constant_tuple(-0.01), rng).accept_probability;
  const bool pass = max_dev <= 1e-10 && std::abs(at_promise - 0.6) <= 1e-12 && null_hi < 0.4 &&
                    null_lo < 0.4;
  return {pass, "max |accept - (1+phi)/2| = " + num(max_dev) + " (k<=6); decide(3/5) = " +
                    num(at_promise) + "; decide(|phi|=0.01) <= " +
                    num(std::max(null_hi, null_lo)) + " < 0.4"};
}

// 6. Gadget identity is exact; compiled circuits reproduce their amplitude.
outcome criterion_compiler() {
  const auto start = std::chrono::steady_clock::now();
  // ((1/2) H4 CSIGN)^3 = SWAP with every entry landing exactly (all values
  // are small dyadic rationals, so double arithmetic is exact).
  Eigen::Matrix4d h, cz;
  for (int x = 0; x < 4; ++x) {
    for (int y = 0; y < 4; ++y) {
      const int dot = (x & y & 1) + ((x >> 1) & (y >> 1));
      h(x, y) = dot % 2 == 0 ? 0.5 : -0.5;
      cz(x, y) = x == y ? (x == 3 ? -1.0 : 1.0) : 0.0;
    }
  }
  const Eigen::Matrix4d g = h * cz;
  const Eigen::Matrix4d g3 = g * g * g;
  bool gadget_exact = true;
  for (int x = 0; x < 4; ++x) {
    for (int y = 0; y < 4; ++y) {
      const int swapped = ((x & 1) << 1) | (x >> 1);
      gadget_exact = gadget_exact && g3(x, y) == (y == swapped ? 1.0 : 0.0);
    }
  }

  rng_t rng = make_rng(106);
  double max_residual = 0.0;
  bool k_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const int n_qubits = 1 + static_cast<int>(rng() % 4);
    const int depth = 1 + static_cast<int>(rng() % 6);
    const circuit c = testutil::random_circuit(n_qubits, depth, rng);
    const auto r = compile_layers(c);
    max_residual = std::max(max_residual, verify_compilation(c, r));
    max_residual = std::max(max_residual, verify_compilation(c, compile_gatewise(c)));
    k_ok = k_ok && static_cast<int>(r.functions.size()) <= 2 * depth + 1;
  }
  const double elapsed = seconds_since(start);
  return {gadget_exact && max_residual <= 1e-9 && k_ok && elapsed < 30.0,
          std::string("gadget identity ") + (gadget_exact ? "exact" : "BROKEN") +
              "; max residual = " + num(max_residual) + ", k <= 2d+1 " +
              (k_ok ? "held" : "VIOLATED") + " on 100 circuits, " + num(elapsed) + "s"};
}

// 7. Extracted polynomials reproduce acceptance and stay bounded.
outcome criterion_extraction() {
  rng_t rng = make_rng(107);
  double max_diff = 0.0;
  for (int n = 1; n <= 3; ++n) {
    for (int t = 1; t <= 2; ++t) {
      for (int rep = 0; rep < 2; ++rep) {
        const auto a = random_algorithm(n, t, rep == 1, rng);
        const auto ex = from_query_algorithm(a);
        const int N = a.input_length;
        for (unsigned mask = 0; mask < (1u << N); ++mask) {
          std::vector<double> X(static_cast<std::size_t>(N));
          for (int b = 0; b < N; ++b) X[static_cast<std::size_t>(b)] = (mask >> b) & 1u ? -1.0 : 1.0;
          const double direct = acceptance_probability(a, X);
          const double viapoly = evaluate(ex.poly, repeated_assignment(ex, X));
          max_diff = std::max(max_diff, std::abs(direct - viapoly));
        }
      }
    }
  }

  const auto big = random_algorithm(3, 2, true, rng);
  const auto ex = from_query_algorithm(big);
  double max_abs = 0.0;
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<std::vector<double>> assignment(static_cast<std::size_t>(ex.poly.k));
    for (int b = 0; b < ex.poly.k; ++b) {
      auto& block = assignment[static_cast<std::size_t>(b)];
      block.resize(static_cast<std::size_t>(ex.poly.block_sizes[static_cast<std::size_t>(b)]));
      for (double& v : block) v = coin(rng) ? 1.0 : -1.0;
    }
    max_abs = std::max(max_abs, std::abs(evaluate(ex.poly, assignment)));
  }
  return {max_diff <= 1e-10 && max_abs <= 1.0 + 1e-9,
          "max |p(X..X) - acceptance| = " + num(max_diff) +
              " on all inputs (n<=3, t<=2); max |p| = " + num(max_abs) +
              " on 10^4 mismatched assignments"};
}

// 8. Balancing drives every Lambda_S to delta within the variable budget.
outcome criterion_balance() {
  rng_t rng = make_rng(108);
  const double eps = 0.3;
  double worst_ratio = 0.0;
  double min_delta = 1.0;
  long long worst_budget = 0;
  bool ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + trial % 3;
    std::uniform_int_distribution<int> size_dist(2, k == 4 ? 4 : 5);
    std::vector<int> sizes(static_cast<std::size_t>(k));
    int max_size = 2;
    for (int& s : sizes) {
      s = size_dist(rng);
      max_size = std::max(max_size, s);
    }
    const double delta = eps * eps / max_size;
    min_delta = std::min(min_delta, delta);
    const auto p = testutil::random_bounded_blockpoly(sizes, 1 + trial % 2, rng);
    const auto bal = balance(p, delta);
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
      std::vector<int> S;
      for (int j = 0; j < k; ++j)
        if (mask & (1u << j)) S.push_back(j);
      const double lam = lambda_S(bal.poly, S);
      worst_ratio = std::max(worst_ratio, lam / delta);
      ok = ok && lam <= delta * (1.0 + 1e-9);
    }
    worst_budget = std::max(worst_budget, bal.trace.new_variable_count);
    ok = ok && bal.trace.new_variable_count <= static_cast<long long>(std::ldexp(1.0, k) / delta);
  }
  return {ok, "max Lambda_S = " + num(worst_ratio) + " x delta (delta = eps^2/block size >= " +
                  num(min_delta) + "); max new vars = " +
                  num(static_cast<double>(worst_budget)) +
                  " within 2^k/delta, 50 polynomials (k in {2,3,4})"};
}

// 9. Marked partial sums: exact unbiasedness and variance under balance.
outcome criterion_estimator_moments() {
  rng_t rng = make_rng(109);
  // Exact enumeration at block size 4, k=2: q = 1/2, all 256 mark patterns
  // equally likely, expectation = p(x)/4.
  double enum_diff = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const auto p = testutil::random_bounded_blockpoly({4, 4}, 2, rng);
    const auto values = testutil::random_block_assignment(p, rng);
    double average = 0.0;
    std::vector<std::vector<char>> marks(2, std::vector<char>(4, 0));
    for (unsigned pattern = 0; pattern < 256; ++pattern) {
      for (int b = 0; b < 8; ++b)
        marks[static_cast<std::size_t>(b / 4)][static_cast<std::size_t>(b % 4)] =
            (pattern >> b) & 1u ? 1 : 0;
      average += marked_partial_sum(p, values, marks);
    }
    average /= 256.0;
    enum_diff = std::max(enum_diff, std::abs(average - evaluate(p, values) / 4.0));
  }

  // Empirical variance of the marked partial sum on balanced polynomials
  // over a 256-variable universe.
  const double eps = 0.5;
  const double delta = eps * eps / 256.0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    const auto p = testutil::random_bounded_blockpoly({128, 128}, 2, rng);
    const auto bal = balance(p, delta);
    const int n = bal.poly.block_sizes[0];
    const auto values = testutil::random_block_assignment(p, rng);
    estimate_options opt;
    opt.repetitions = 1000;
    opt.audit_balance = false;
    const auto rep = estimate_blockpoly(bal.poly, values, eps, rng, opt, &bal.trace);
    std::vector<double> partial = rep.per_repetition_values;
    for (double& v : partial) v /= static_cast<double>(n);
    worst_ratio = std::max(worst_ratio, sample_variance(partial) / (delta / n));
  }
  return {enum_diff <= 1e-12 && worst_ratio <= 10.0,
          "enumeration |mean - p(x)/n| = " + num(enum_diff) +
              "; Var(marked sum) = " + num(worst_ratio) + " x delta/n (limit 10x), 1000 samples"};
}

// 10. End-to-end classical simulation: accuracy and sublinear reads.
outcome criterion_end_to_end() {
  int successes = 0;
  bool queries_ok = true;
  long long max_queries_32 = 0, max_queries_64 = 0;
  const double eps = 0.2;
  int run_index = 0;
  for (int n = 3; n <= 6; ++n) {
    const int N = 1 << n;
    const auto a = testutil::self_transform_algorithm(n, 1);
    for (int run = 0; run < 50; ++run, ++run_index) {
      auto rng = derive_rng(110, static_cast<std::uint64_t>(run_index));
      const auto X = testutil::random_boolean_table(static_cast<std::size_t>(N), rng);
      const double truth = acceptance_probability(a, X);
      estimate_options opt;
      opt.repetitions = 36;
      const auto rep = simulate_quantum_classically(a, X, eps, rng, opt);
      if (std::abs(rep.estimate - truth) <= eps) ++successes;
      if (N == 32) {
        queries_ok = queries_ok && rep.queries_used < N;
        max_queries_32 = std::max(max_queries_32, rep.queries_used);
      }
      if (N == 64) {
        queries_ok = queries_ok && rep.queries_used < N;
        max_queries_64 = std::max(max_queries_64, rep.queries_used);
      }
    }
  }
  const double rate = successes / 200.0;
  return {rate >= 2.0 / 3.0 && queries_ok,
          "success rate = " + num(rate) + " (>= 2/3) over 200 runs (t=1, N=8..64, eps=0.2); max "
              "queries " +
              num(static_cast<double>(max_queries_32)) + "@N=32, " +
              num(static_cast<double>(max_queries_64)) + "@N=64, both < N"};
}

// 11. Quadratic estimator: accuracy and terminated splitting loops.
outcome criterion_quadratic() {
  int successes = 0;
  bool loops_ok = true;
  const double eps = 0.1;
  for (int trial = 0; trial < 50; ++trial) {
    auto rng = derive_rng(111, static_cast<std::uint64_t>(trial));
    const auto p = testutil::random_bounded_quadratic(256, rng);
    const auto x = testutil::random_boolean_table(256, rng);
    const double truth = evaluate(p, x);
    const auto rep = estimate_quadratic(p, x, eps, rng);
    if (std::abs(rep.estimate - truth) <= eps) ++successes;
    const double nf = rep.variables_after;
    loops_ok = loops_ok && rep.variance_after <= 4.0 / nf + 1e-12 &&
               rep.row_statistic_after <= 4.0 * std::log(nf) / nf + 1e-12;
  }
  const double rate = successes / 50.0;
  return {rate >= 2.0 / 3.0 && loops_ok,
          "success rate = " + num(rate) + " (>= 2/3) at eps=0.1, 50 quadratics over 256 "
              "variables; split loops ended with Var <= C/n and V <= C log n / n"};
}

// 12. Gram-Schmidt statistics match the Gram-matrix oracle; envelopes hold.
outcome criterion_gram_schmidt() {
  double max_diff = 0.0;
  const auto vs6 = make_forrelation_vectors(6);
  for (int trial = 0; trial < 500; ++trial) {
    auto rng = derive_rng(112, static_cast<std::uint64_t>(trial));
    std::vector<int> ids(vs6.count());
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(20);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto tr = make_transcript(vs6);
    Eigen::MatrixXd G(20, 20);
    Eigen::VectorXd resp(20);
    for (int i = 0; i < 20; ++i) {
      const double a = gauss(rng);
      resp(i) = a;
      gs_update(tr, ids[static_cast<std::size_t>(i)], a);
      for (int j = 0; j < 20; ++j) {
        G(i, j) = inner_product(vs6, ids[static_cast<std::size_t>(i)],
                                ids[static_cast<std::size_t>(j)]);
      }
    }
    const double oracle = resp.dot(G.ldlt().solve(resp));
    max_diff = std::max(max_diff, std::abs(tr.delta_f - oracle));
  }

  bool envelopes_ok = true;
  double worst_dot = 0.0, worst_beta = 0.0;
  for (int n : {8, 10, 12}) {
    const auto vs = make_forrelation_vectors(n);
    const double eps = vs.epsilon_bound;
    const int t = static_cast<int>(0.1 / eps);  // 0.1 sqrt(N) queries
    for (int rep = 0; rep < 30; ++rep) {
      auto rng = derive_rng(113, static_cast<std::uint64_t>(n * 100 + rep));
      std::vector<int> ids(vs.count());
      std::iota(ids.begin(), ids.end(), 0);
      std::shuffle(ids.begin(), ids.end(), rng);
      std::normal_distribution<double> gauss(0.0, 1.0);
      auto tr = make_transcript(vs);
      for (int i = 0; i < t; ++i) gs_update(tr, ids[static_cast<std::size_t>(i)], gauss(rng));
      for (std::size_t i = 0; i < tr.size(); ++i) {
        worst_beta = std::max(worst_beta, tr.betas[i] / (1.0 + 0.2 * eps));
        for (double d : tr.v_dot_w[i]) {
          worst_dot = std::max(worst_dot, std::abs(d) / (1.2 * eps));
        }
      }
    }
  }
  envelopes_ok = worst_dot <= 1.0 && worst_beta <= 1.0;
  return {max_diff <= 1e-8 && envelopes_ok,
          "max |delta_F - Gram oracle| = " + num(max_diff) +
              " on 500 transcripts (t=20, n=6); envelope ratios: dot " + num(worst_dot) +
              ", beta " + num(worst_beta) + " (<= 1) for t <= 0.1 sqrt(N), n in {8,10,12}"};
}

// 13. Distinguisher bias: hard at t=8 queries, easy at full coverage.
outcome criterion_bias_separation() {
  const auto vs = make_forrelation_vectors(10);
  auto rng_low = make_rng(114);
  const auto low = run_distinguisher(vs, query_strategy::random_order, 8, 1000, rng_low);
  auto rng_high = make_rng(115);
  const auto high = run_distinguisher(vs, query_strategy::random_order,
                                      static_cast<int>(vs.count()), 1000, rng_high);
  return {low.bias <= 0.15 && high.bias >= 0.95,
          "bias(t=8) = " + num(low.bias) + " (<= 0.15), bias(t=2N) = " + num(high.bias) +
              " (>= 0.95), n=10, 1000 trials per case"};
}

// 14. Spectrum sampling: normalization and the relation success gap.
outcome criterion_fourier_sampling() {
  const auto start = std::chrono::steady_clock::now();
  rng_t rng = make_rng(116);
  double worst_mass = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = trial % 11;
    const auto f = testutil::random_boolean_table(std::size_t{1} << n, rng);
    const auto d = exact_distribution(f);
    double mass = 0.0;
    for (double p : d.probabilities) mass += p;
    worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
  }

  long long quantum_hits = 0, zero_hits = 0;
  const int trials = 100000;
  for (int trial = 0; trial < trials; ++trial) {
    auto trng = derive_rng(117, static_cast<std::uint64_t>(trial));
    const auto f = testutil::random_boolean_table(std::size_t{1} << 10, trng);
    quantum_hits += relation_solve(f, 1.0, relation_strategy::quantum, trng).success;
    zero_hits += relation_solve(f, 1.0, relation_strategy::zero_query, trng).success;
  }
  const double quantum_rate = static_cast<double>(quantum_hits) / trials;
  const double zero_rate = static_cast<double>(zero_hits) / trials;
  const double elapsed = seconds_since(start);
  const bool pass = worst_mass <= 1e-12 && std::abs(quantum_rate - 0.80) <= 0.02 &&
                    std::abs(zero_rate - 0.317) <= 0.02 && elapsed < 60.0;
  return {pass, "max |mass - 1| = " + num(worst_mass) + "; success " + num(quantum_rate) +
                    " (0.80 +- 0.02) vs " + num(zero_rate) +
                    " (0.317 +- 0.02), c=1, n=10, 10^5 trials, " + num(elapsed) + "s"};
}

// 15. Corruption damps the amplitude geometrically.  The damping factor uses
// the realized corruption fraction round(eps * 2^n) / 2^n: corrupt()
// re-randomizes that exact number of positions per function, and at n=8 none
// of the nominal eps values land on the 1/256 grid, which would otherwise
// leave a systematic ~5-sigma gap at this sample size.
outcome criterion_corruption() {
  const int n = 8;
  const double N = 256.0;
  double max_dev_sigmas = 0.0;
  std::uint64_t combo = 0;
  for (int k : {2, 3}) {
    auto base_rng = make_rng(900 + static_cast<std::uint64_t>(k));
    const auto base = sign_round(sample_kfold_hybrid(n, k, measure_kind::forrelated, base_rng));
    const double phi0 = phi(base).phi;
    for (double eps : {0.05, 0.1, 0.2}) {
      std::vector<double> values;
      for (int trial = 0; trial < 5000; ++trial) {
        auto rng = derive_rng(118, (combo << 40) | static_cast<std::uint64_t>(trial));
        values.push_back(phi(corrupt(base, eps, rng)).phi);
      }
      const double mean = sample_mean(values);
      const double se = std::sqrt(sample_variance(values) / 5000.0);
      const double realized = std::llround(eps * N) / N;
      const double predicted = std::pow(1.0 - realized, k) * phi0;
      max_dev_sigmas = std::max(max_dev_sigmas, std::abs(mean - predicted) / se);
      ++combo;
    }
  }
  return {max_dev_sigmas <= 3.0,
          "max |mean - (1-eps)^k phi| = " + num(max_dev_sigmas) +
              " standard errors (limit 3) over eps in {0.05,0.1,0.2}, k in {2,3}, n=8, 5000 "
              "trials each"};
}

}  // namespace

int main() {
  struct criterion {
    const char* name;
    std::function<outcome()> run;
  };
  const std::vector<criterion> criteria = {
      {"phi oracle equivalence", criterion_phi_oracle},
      {"unitarity identities", criterion_unitarity},
      {"rounding constant", criterion_rounding_constant},
      {"uniform second moment", criterion_uniform_moment},
      {"quantum algorithm thresholds", criterion_query_thresholds},
      {"gadget exactness and compiler round-trip", criterion_compiler},
      {"block-multilinear extraction", criterion_extraction},
      {"balancing", criterion_balance},
      {"estimator moments", criterion_estimator_moments},
      {"end-to-end simulation", criterion_end_to_end},
      {"quadratic estimator", criterion_quadratic},
      {"Gram-Schmidt machinery", criterion_gram_schmidt},
      {"distinguisher bias separation", criterion_bias_separation},
      {"Fourier sampling", criterion_fourier_sampling},
      {"corruption lemma", criterion_corruption},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %02zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return 2;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
