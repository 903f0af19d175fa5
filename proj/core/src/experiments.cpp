#include "forrelab/experiments.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <utility>

#include "forrelab/blockpoly.hpp"
#include "forrelab/bqp_compiler.hpp"
#include "forrelab/errors.hpp"
#include "forrelab/estimators.hpp"
#include "forrelab/fourier_sampling.hpp"
#include "forrelab/gaussian_lab.hpp"
#include "forrelab/hadamard.hpp"
#include "forrelab/instances.hpp"
#include "forrelab/io.hpp"
#include "forrelab/phi.hpp"
#include "forrelab/query_sim.hpp"
#include "forrelab/rng.hpp"
#include "json.hpp"

namespace forrelab {

namespace {

std::vector<double> random_table(std::size_t len, rng_t& rng) {
  std::bernoulli_distribution coin(0.5);
  std::vector<double> f(len);
  for (double& v : f) v = coin(rng) ? 1.0 : -1.0;
  return f;
}

instance_tuple random_tuple(int n, int k, rng_t& rng) {
  instance_tuple t;
  t.n = n;
  for (int i = 0; i < k; ++i) t.functions.push_back(random_table(std::size_t{1} << n, rng));
  return t;
}

circuit random_circuit(int n_qubits, int depth, rng_t& rng) {
  std::bernoulli_distribution coin(0.5);
  circuit c;
  c.n_qubits = n_qubits;
  for (int layer = 0; layer < depth; ++layer) {
    circuit_layer l;
    std::vector<int> wires(static_cast<std::size_t>(n_qubits));
    std::iota(wires.begin(), wires.end(), 0);
    std::shuffle(wires.begin(), wires.end(), rng);
    std::vector<char> used(static_cast<std::size_t>(n_qubits), 0);
    if (n_qubits >= 2 && coin(rng)) {
      std::array<int, 2> cz{wires[0], wires[1]};
      std::sort(cz.begin(), cz.end());
      l.csigns.push_back(cz);
      used[static_cast<std::size_t>(cz[0])] = used[static_cast<std::size_t>(cz[1])] = 1;
    }
    if (n_qubits >= 3 && coin(rng)) {
      std::array<int, 3> cc{wires[n_qubits - 1], wires[n_qubits - 2], wires[n_qubits - 3]};
      std::sort(cc.begin(), cc.end());
      l.ccsigns.push_back(cc);
      for (int w : cc) used[static_cast<std::size_t>(w)] = 1;
    }
    for (int w = 0; w < n_qubits; ++w) {
      if (!used[static_cast<std::size_t>(w)] && coin(rng)) l.hadamards.push_back(w);
    }
    c.layers.push_back(std::move(l));
  }
  validate_circuit(c);
  return c;
}

query_algorithm self_transform_algorithm(int n, int t) {
  const int N = 1 << n;
  Eigen::MatrixXd H(N, N);
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  for (int x = 0; x < N; ++x) {
    for (int y = 0; y < N; ++y) {
      H(x, y) = (std::popcount(static_cast<unsigned>(x & y)) & 1) != 0 ? -scale : scale;
    }
  }
  query_algorithm a;
  a.n = n;
  a.t = t;
  a.input_length = N;
  for (int q = 0; q <= t; ++q) a.unitaries.push_back(H);
  a.query_index_map.resize(static_cast<std::size_t>(N));
  for (int s = 0; s < N; ++s) a.query_index_map[static_cast<std::size_t>(s)] = s;
  a.accepting_states = {0};
  return a;
}

std::string fmt(double v) { return format_double(v); }
std::string fmt(long long v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stderr_of(const std::vector<double>& xs, double mean) {
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const auto n = static_cast<double>(xs.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

// ---- individual experiments -------------------------------------------------

void run_phi_oracle_equiv(experiment_report& rep) {
  const auto& cfg = rep.config;
  rep.schema = "phi-oracle-equiv/v1";
  rep.header = {"trial", "n", "k", "phi", "phi_brute", "abs_diff"};
  double max_diff = 0.0;
  for (long long trial = 0; trial < cfg.trials; ++trial) {
    auto rng = derive_rng(cfg.seed, static_cast<std::uint64_t>(trial));
    const int n = 1 + static_cast<int>(trial % 3);
    const int k = 1 + static_cast<int>((trial / 3) % 3);
    const auto t = random_tuple(n, k, rng);
    const double fast = phi(t).phi;
    const double brute = phi_bruteforce(t);
    const double diff = std::abs(fast - brute);
    max_diff = std::max(max_diff, diff);
    rep.rows.push_back({fmt(trial), fmt(n), fmt(k), fmt(fast), fmt(brute), fmt(diff)});
  }
  rep.metrics["max_abs_diff"] = max_diff;
  rep.pass = max_diff <= 1e-12;
}

void run_rounding_two_over_pi(experiment_report& rep) {
  const auto& cfg = rep.config;
  rep.schema = "rounding-2-over-pi/v1";
  rep.header = {"trial", "phi"};
  std::vector<double> phis;
  for (long long trial = 0; trial < cfg.trials; ++trial) {
    auto rng = derive_rng(cfg.seed, static_cast<std::uint64_t>(trial));
    const auto t = cfg.k == 2
                       ? sample_real_pair(cfg.n, measure_kind::forrelated, rng)
                       : sample_kfold_hybrid(cfg.n, cfg.k, measure_kind::forrelated, rng);
    const double value = phi(sign_round(t)).phi;
    phis.push_back(value);
    rep.rows.push_back({fmt(trial), fmt(value)});
  }
  const double mean = mean_of(phis);
  const double se = stderr_of(phis, mean);
  const double lo = cfg.k == 2 ? 0.60 : 0.58;
  const double hi = cfg.k == 2 ? 0.67 : 0.68;
  rep.metrics["mean_phi"] = mean;
  rep.metrics["std_error"] = se;
  rep.metrics["ci3_low"] = mean - 3.0 * se;
  rep.metrics["ci3_high"] = mean + 3.0 * se;
  rep.metrics["two_over_pi"] = 2.0 / std::acos(-1.0);
  rep.metrics["window_low"] = lo;
  rep.metrics["window_high"] = hi;
  rep.pass = mean >= lo && mean <= hi;
}

void run_qsim_thresholds(experiment_report& rep) {
  const auto& cfg = rep.config;
  rep.schema = "qsim-thresholds/v1";
  rep.header = {"section", "case", "phi", "accept_probability", "decide_probability"};
  double max_dev = 0.0;
  for (long long trial = 0; trial < cfg.trials; ++trial) {
    auto rng = derive_rng(cfg.seed, static_cast<std::uint64_t>(trial));
    const int k = 1 + static_cast<int>(trial % 4);
    const auto t = random_tuple(cfg.n, k, rng);
    const double value = phi(t).phi;
    const double accept = halfk_accept_probability(t);
    const double decide_p = decide(t, rng).accept_probability;
    max_dev = std::max(max_dev, std::abs(accept - 0.5 * (1.0 + value)));
    rep.rows.push_back({"identity", fmt(trial), fmt(value), fmt(accept), fmt(decide_p)});
  }

  auto constant_tuple = [&](double c) {
    instance_tuple t;
    t.n = cfg.n;
    t.functions = {std::vector<double>(std::size_t{1} << cfg.n, c)};
    return t;
  };
  auto rng = derive_rng(cfg.seed, 1u << 20);
  const double at_promise = decide(constant_tuple(0.6), rng).accept_probability;
  const double at_null = decide(constant_tuple(0.01), rng).accept_probability;
  rep.rows.push_back({"promise", "0", "0.6", fmt(halfk_accept_probability(constant_tuple(0.6))),
                      fmt(at_promise)});
  rep.rows.push_back({"null", "0", "0.01", fmt(halfk_accept_probability(constant_tuple(0.01))),
                      fmt(at_null)});

  rep.metrics["max_accept_deviation"] = max_dev;
  rep.metrics["decide_at_three_fifths"] = at_promise;
  rep.metrics["decide_at_small_phi"] = at_null;
  rep.pass = max_dev <= 1e-10 && std::abs(at_promise - 0.6) <= 1e-12 && at_null < 0.4;
}

void run_estimator_scaling(experiment_report& rep) {
  const auto& cfg = rep.config;
  rep.schema = "estimator-scaling/v1";
  rep.header = {"N", "run", "truth", "estimate", "abs_error", "queries", "success"};
  const std::vector<int> ns = {3, 4, 5, 6};
  bool pass = true;
  for (std::size_t idx = 0; idx < ns.size(); ++idx) {
    const int n = ns[idx];
    const int N = 1 << n;
    const query_algorithm a = self_transform_algorithm(n, 1);
    const extraction_result ex = from_query_algorithm(a);
    const double delta = cfg.eps * cfg.eps / N;
    balance_options bopt;
    bopt.boundedness_samples = 8;
    const balance_result bal = balance(ex.poly, delta, bopt);
    const std::vector<std::vector<int>> positions(static_cast<std::size_t>(bal.poly.k),
                                                  ex.variable_position);
    long long successes = 0;
    double query_sum = 0.0;
    for (long long run = 0; run < cfg.trials; ++run) {
      auto rng = derive_rng(cfg.seed, (static_cast<std::uint64_t>(idx) << 32) |
                                          static_cast<std::uint64_t>(run));
      const auto X = random_table(static_cast<std::size_t>(N), rng);
      const double truth = acceptance_probability(a, X);
      estimate_options opt;
      opt.repetitions = 36;
      opt.audit_balance = run == 0;
      opt.audit_delta = delta;
      const estimate_report er =
          estimate_blockpoly(bal.poly, repeated_assignment(ex, X), cfg.eps, rng, opt, &bal.trace,
                             &positions);
      const double err = std::abs(er.estimate - truth);
      const bool ok = err <= cfg.eps;
      successes += ok ? 1 : 0;
      query_sum += static_cast<double>(er.queries_used);
      rep.rows.push_back({fmt(N), fmt(run), fmt(truth), fmt(er.estimate), fmt(err),
                          fmt(er.queries_used), ok ? "1" : "0"});
    }
    const double rate = static_cast<double>(successes) / static_cast<double>(cfg.trials);
    const double mean_queries = query_sum / static_cast<double>(cfg.trials);
    rep.metrics["success_rate_N" + std::to_string(N)] = rate;
    rep.metrics["mean_queries_N" + std::to_string(N)] = mean_queries;
    pass = pass && rate >= 2.0 / 3.0;
    if (N >= 32) pass = pass && mean_queries < N;
  }
  rep.pass = pass;
}

void run_compiler_roundtrip(experiment_report& rep) {
  const auto& cfg = rep.config;
  rep.schema = "compiler-roundtrip/v1";
  rep.header = {"trial",      "n_qubits",          "depth",
                "k_gatewise", "k_layered",         "residual_gatewise",
                "residual_layered"};
  double max_residual = 0.0;
  bool k_bound_ok = true;
  for (long long trial = 0; trial < cfg.trials; ++trial) {
    auto rng = derive_rng(cfg.seed, static_cast<std::uint64_t>(trial));
    const int n_qubits = 1 + static_cast<int>(rng() % 4);
    const int depth = 1 + static_cast<int>(rng() % 6);
    const circuit c = random_circuit(n_qubits, depth, rng);
    const auto gate = compile_gatewise(c);
    const auto layer = compile_layers(c);
    const double rg = verify_compilation(c, gate);
    const double rl = verify_compilation(c, layer);
    max_residual = std::max({max_residual, rg, rl});
    const auto k_layered = static_cast<int>(layer.functions.size());
    k_bound_ok = k_bound_ok && k_layered <= 2 * depth + 1;
    rep.rows.push_back({fmt(trial), fmt(n_qubits), fmt(depth),
                        fmt(static_cast<int>(gate.functions.size())), fmt(k_layered), fmt(rg),
                        fmt(rl)});
  }
  rep.metrics["max_residual"] = max_residual;
  rep.metrics["k_bound_ok"] = k_bound_ok ? 1.0 : 0.0;
  rep.pass = max_residual <= 1e-9 && k_bound_ok;
}

void run_gaussian_bias_curve(experiment_report& rep) {
  const auto& cfg = rep.config;
  rep.schema = "gaussian-bias-curve/v1";
  rep.header = {"t", "trials_per_case", "rate_structured", "rate_independent", "bias",
                "standard_error"};
  const auto vs = make_forrelation_vectors(cfg.n);
  const auto strategy = strategy_from_string(cfg.strategy);
  const int full = static_cast<int>(vs.count());
  std::vector<int> budget = {1, 2, 4, 8, 16, 32, 64};
  budget.erase(std::remove_if(budget.begin(), budget.end(), [&](int t) { return t >= full; }),
               budget.end());
  budget.push_back(full);
  double bias_at_8 = -1.0;
  double bias_at_full = -1.0;
  for (std::size_t idx = 0; idx < budget.size(); ++idx) {
    const int t = budget[idx];
    auto rng = derive_rng(cfg.seed, 0x6b1a5000ULL + idx);
    const bias_report br =
        run_distinguisher(vs, strategy, t, static_cast<int>(cfg.trials), rng);
    if (t == 8) bias_at_8 = br.bias;
    if (t == full) bias_at_full = br.bias;
    rep.rows.push_back({fmt(t), fmt(br.trials_per_case), fmt(br.rate_structured),
                        fmt(br.rate_independent), fmt(br.bias), fmt(br.standard_error)});
    rep.metrics["bias_t" + std::to_string(t)] = br.bias;
  }
  rep.metrics["bias_low_budget"] = bias_at_8;
  rep.metrics["bias_full_coverage"] = bias_at_full;
  rep.pass = bias_at_8 >= 0.0 && bias_at_8 <= 0.15 && bias_at_full >= 0.95;
}

void run_fsample_relation(experiment_report& rep) {
  const auto& cfg = rep.config;
  rep.schema = "fsample-relation/v1";
  rep.header = {"trial", "y_quantum", "quantum_success", "zero_query_success"};
  long long quantum_hits = 0;
  long long zero_hits = 0;
  for (long long trial = 0; trial < cfg.trials; ++trial) {
    auto rng = derive_rng(cfg.seed, static_cast<std::uint64_t>(trial));
    const auto f = random_table(std::size_t{1} << cfg.n, rng);
    const auto q = relation_solve(f, cfg.threshold, relation_strategy::quantum, rng);
    const auto z = relation_solve(f, cfg.threshold, relation_strategy::zero_query, rng);
    quantum_hits += q.success ? 1 : 0;
    zero_hits += z.success ? 1 : 0;
    rep.rows.push_back({fmt(trial), fmt(q.y), q.success ? "1" : "0", z.success ? "1" : "0"});
  }
  const double quantum_rate = static_cast<double>(quantum_hits) / static_cast<double>(cfg.trials);
  const double zero_rate = static_cast<double>(zero_hits) / static_cast<double>(cfg.trials);
  rep.metrics["quantum_rate"] = quantum_rate;
  rep.metrics["zero_query_rate"] = zero_rate;
  rep.metrics["gap"] = quantum_rate - zero_rate;
  rep.metrics["threshold"] = cfg.threshold;
  rep.pass = std::abs(quantum_rate - 0.80) <= 0.02 && std::abs(zero_rate - 0.317) <= 0.02;
}

void run_corruption_lemma(experiment_report& rep) {
  const auto& cfg = rep.config;
  rep.schema = "corruption-lemma/v1";
  rep.header = {"k", "eps", "trial", "phi_corrupt"};
  const std::vector<int> ks = cfg.k > 0 ? std::vector<int>{cfg.k} : std::vector<int>{2, 3};
  const std::vector<double> epss =
      cfg.eps > 0.0 ? std::vector<double>{cfg.eps} : std::vector<double>{0.05, 0.1, 0.2};
  double max_dev_sigmas = 0.0;
  std::uint64_t combo = 0;
  for (int k : ks) {
    auto base_rng = derive_rng(cfg.seed, 0xba5e0000ULL + static_cast<std::uint64_t>(k));
    const instance_tuple base =
        sign_round(sample_kfold_hybrid(cfg.n, k, measure_kind::forrelated, base_rng));
    const double phi0 = phi(base).phi;
    rep.metrics["base_phi_k" + std::to_string(k)] = phi0;
    for (double eps : epss) {
      std::vector<double> values;
      values.reserve(static_cast<std::size_t>(cfg.trials));
      for (long long trial = 0; trial < cfg.trials; ++trial) {
        auto rng = derive_rng(cfg.seed, (combo << 40) | static_cast<std::uint64_t>(trial));
        const double value = phi(corrupt(base, eps, rng)).phi;
        values.push_back(value);
        rep.rows.push_back({fmt(k), fmt(eps), fmt(trial), fmt(value)});
      }
      const double mean = mean_of(values);
      const double se = stderr_of(values, mean);
      const double predicted = std::pow(1.0 - eps, k) * phi0;
      const double dev = se > 0.0 ? std::abs(mean - predicted) / se : 0.0;
      max_dev_sigmas = std::max(max_dev_sigmas, dev);
      const std::string tag = "_k" + std::to_string(k) + "_eps" + fmt(eps);
      rep.metrics["mean" + tag] = mean;
      rep.metrics["predicted" + tag] = predicted;
      rep.metrics["std_error" + tag] = se;
      rep.metrics["dev_sigmas" + tag] = dev;
      ++combo;
    }
  }
  rep.metrics["max_dev_sigmas"] = max_dev_sigmas;
  rep.pass = max_dev_sigmas <= 3.0;
}

struct experiment_entry {
  const char* name;
  void (*defaults)(experiment_config&);
  void (*run)(experiment_report&);
};

const experiment_entry kExperiments[] = {
    {"phi-oracle-equiv",
     [](experiment_config& c) {
       if (c.trials == 0) c.trials = 200;
     },
     run_phi_oracle_equiv},
    {"rounding-2-over-pi",
     [](experiment_config& c) {
       if (c.n == 0) c.n = 10;
       if (c.k == 0) c.k = 2;
       if (c.trials == 0) c.trials = 2000;
     },
     run_rounding_two_over_pi},
    {"qsim-thresholds",
     [](experiment_config& c) {
       if (c.n == 0) c.n = 4;
       if (c.trials == 0) c.trials = 100;
     },
     run_qsim_thresholds},
    {"estimator-scaling",
     [](experiment_config& c) {
       if (c.eps == 0.0) c.eps = 0.2;
       if (c.trials == 0) c.trials = 200;
     },
     run_estimator_scaling},
    {"compiler-roundtrip",
     [](experiment_config& c) {
       if (c.trials == 0) c.trials = 100;
     },
     run_compiler_roundtrip},
    {"gaussian-bias-curve",
     [](experiment_config& c) {
       if (c.n == 0) c.n = 10;
       if (c.trials == 0) c.trials = 1000;
       if (c.strategy.empty()) c.strategy = "random-order";
     },
     run_gaussian_bias_curve},
    {"fsample-relation",
     [](experiment_config& c) {
       if (c.n == 0) c.n = 10;
       if (c.trials == 0) c.trials = 100000;
       if (c.threshold == 0.0) c.threshold = 1.0;
     },
     run_fsample_relation},
    {"corruption-lemma",
     [](experiment_config& c) {
       if (c.n == 0) c.n = 8;
       if (c.trials == 0) c.trials = 5000;
     },
     run_corruption_lemma},
};

const experiment_entry& find_experiment(const std::string& name) {
  for (const auto& e : kExperiments) {
    if (name == e.name) return e;
  }
  std::string names;
  for (const auto& e : kExperiments) {
    if (!names.empty()) names += ", ";
    names += e.name;
  }
  throw value_error("unknown experiment \"" + name + "\" (known: " + names + ")");
}

nlohmann::json config_json(const experiment_config& cfg) {
  nlohmann::json j;
  j["name"] = cfg.name;
  j["n"] = cfg.n;
  j["k"] = cfg.k;
  j["eps"] = cfg.eps;
  j["threshold"] = cfg.threshold;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["strategy"] = cfg.strategy;
  j["format"] = cfg.format;
  return j;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : kExperiments) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

experiment_config resolve_config(const experiment_config& cfg) {
  const auto& entry = find_experiment(cfg.name);
  experiment_config resolved = cfg;
  if (resolved.format.empty()) resolved.format = "csv";
  if (resolved.format != "csv" && resolved.format != "json") {
    throw value_error("format must be csv or json");
  }
  entry.defaults(resolved);
  if (resolved.trials < 1) throw value_error("trials must be positive");
  if (resolved.n < 0 || resolved.n > 16) throw value_error("n out of range");
  if (resolved.k < 0 || resolved.k > 8) throw value_error("k out of range");
  if (resolved.eps < 0.0 || resolved.eps >= 1.0) throw value_error("eps out of range");
  if (resolved.threshold < 0.0) throw value_error("threshold must be nonnegative");
  return resolved;
}

experiment_report run_experiment(const experiment_config& cfg) {
  const auto start = std::chrono::steady_clock::now();
  experiment_report rep;
  rep.config = resolve_config(cfg);
  rep.name = rep.config.name;
  find_experiment(rep.name).run(rep);

  rep.data_csv = to_csv(rep.header, rep.rows);
  rep.data_hash = content_hash(rep.data_csv);
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::json summary;
  summary["experiment"] = rep.name;
  summary["schema"] = rep.schema;
  summary["config"] = config_json(rep.config);
  summary["metrics"] = rep.metrics;
  summary["pass"] = rep.pass;
  summary["rows"] = rep.rows.size();
  summary["data_hash"] = rep.data_hash;
  summary["elapsed_seconds"] = rep.elapsed_seconds;
  rep.summary_json = summary.dump(2) + "\n";

  if (!rep.config.out_path.empty()) {
    if (rep.config.format == "csv") {
      write_text_file(rep.config.out_path + ".csv", rep.data_csv);
    } else {
      nlohmann::json data;
      data["header"] = rep.header;
      data["rows"] = rep.rows;
      write_text_file(rep.config.out_path + ".data.json", data.dump() + "\n");
    }
    write_text_file(rep.config.out_path + ".summary.json", rep.summary_json);
  }
  return rep;
}

}  // namespace forrelab
