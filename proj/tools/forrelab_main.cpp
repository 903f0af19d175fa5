#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "forrelab/bqp_compiler.hpp"
#include "forrelab/errors.hpp"
#include "forrelab/estimators.hpp"
#include "forrelab/experiments.hpp"
#include "forrelab/fourier_sampling.hpp"
#include "forrelab/gaussian_lab.hpp"
#include "forrelab/instances.hpp"
#include "forrelab/io.hpp"
#include "forrelab/phi.hpp"
#include "forrelab/query_sim.hpp"
#include "forrelab/rng.hpp"
#include "json.hpp"

namespace {

using namespace forrelab;
using nlohmann::json;

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

json compile_result_json(const compile_result& r) {
  json funcs = json::array();
  for (const auto& f : r.functions) {
    json jf;
    jf["monomials"] = f.monomials;
    funcs.push_back(std::move(jf));
  }
  json j;
  j["n_bits"] = r.n_bits;
  j["dummy_count"] = r.dummy_count;
  j["scale"] = r.scale;
  j["qubit_relabeling"] = r.qubit_relabeling;
  j["functions"] = std::move(funcs);
  return j;
}

compile_result compile_result_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw io_error("invalid JSON for compiled functions");
  compile_result r;
  r.n_bits = j.at("n_bits").get<int>();
  r.dummy_count = j.at("dummy_count").get<int>();
  r.scale = j.at("scale").get<double>();
  r.qubit_relabeling = j.at("qubit_relabeling").get<std::vector<int>>();
  for (const auto& jf : j.at("functions")) {
    phase_poly_function f;
    f.n_bits = r.n_bits;
    f.monomials = jf.at("monomials").get<std::vector<std::vector<int>>>();
    for (const auto& mono : f.monomials) {
      for (int v : mono) {
        if (v < 0 || v >= r.n_bits) throw value_error("monomial variable out of range");
      }
    }
    r.functions.push_back(std::move(f));
  }
  return r;
}

std::vector<std::vector<double>> blocks_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw io_error("invalid JSON for a block assignment");
  if (!j.contains("blocks") || !j["blocks"].is_array()) {
    throw io_error("block assignment must be {\"blocks\": [[...], ...]}");
  }
  std::vector<std::vector<double>> blocks;
  for (const auto& b : j["blocks"]) {
    blocks.push_back(b.get<std::vector<double>>());
  }
  return blocks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forrelab: Forrelation-family algorithms workbench"};
  app.require_subcommand(1);
  std::function<int()> action;

  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  auto add_common = [&](CLI::App* sub, bool with_format = false) {
    sub->add_option("--seed", seed, "Master RNG seed")->capture_default_str();
    sub->add_option("--out", out, "Output file (default: stdout)");
    if (with_format) {
      sub->add_option("--format", format, "Trial-table format: csv | json")
          ->capture_default_str();
    }
  };

  // gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Sample a function tuple and write it as JSON");
  int gen_n = 0, gen_k = 2;
  std::string gen_measure = "forrelated";
  bool gen_rounded = false;
  gen->add_option("--n", gen_n, "log2 of the domain size")->required();
  gen->add_option("--k", gen_k, "Number of functions (>= 2)")->capture_default_str();
  gen->add_option("--measure", gen_measure, "uniform | forrelated")->capture_default_str();
  gen->add_flag("--rounded", gen_rounded, "Sign-round to a +-1 tuple");
  add_common(gen);
  gen->callback([&] {
    action = [&]() {
      auto rng = make_rng(seed);
      instance_tuple t = sample_kfold_hybrid(gen_n, gen_k, measure_from_string(gen_measure), rng);
      if (gen_rounded) t = sign_round(t);
      emit(out, tuple_to_json(t) + "\n");
      return 0;
    };
  });

  // phi ----------------------------------------------------------------
  auto* phi_cmd = app.add_subcommand("phi", "Evaluate the pipeline amplitude of a tuple");
  std::string phi_in;
  bool phi_brute = false;
  phi_cmd->add_option("--in", phi_in, "Tuple JSON file")->required();
  phi_cmd->add_flag("--brute-force", phi_brute, "Also evaluate the nested-sum oracle");
  add_common(phi_cmd);
  phi_cmd->callback([&] {
    action = [&]() {
      const auto t = tuple_from_json(read_text_file(phi_in));
      const double value = phi(t).phi;
      json j;
      j["phi"] = value;
      j["n"] = t.n;
      j["k"] = t.k();
      if (phi_brute) {
        const double brute = phi_bruteforce(t);
        j["phi_brute"] = brute;
        j["abs_diff"] = std::abs(value - brute);
      }
      emit(out, j.dump(2) + "\n");
      return 0;
    };
  });

  // qsim ---------------------------------------------------------------
  auto* qsim = app.add_subcommand("qsim", "Run the halved-query decision circuit on a tuple");
  std::string qsim_in;
  long long qsim_trials = 100;
  qsim->add_option("--in", qsim_in, "Tuple JSON file")->required();
  qsim->add_option("--trials", qsim_trials, "Sampled decisions")->capture_default_str();
  add_common(qsim);
  qsim->callback([&] {
    action = [&]() {
      const auto t = tuple_from_json(read_text_file(qsim_in));
      const double value = phi(t).phi;
      std::vector<std::vector<std::string>> rows;
      for (long long trial = 0; trial < qsim_trials; ++trial) {
        auto rng = derive_rng(seed, static_cast<std::uint64_t>(trial));
        const decision_outcome d = decide(t, rng);
        rows.push_back({std::to_string(trial), format_double(value),
                        format_double(d.accept_probability), d.accept ? "1" : "0"});
      }
      emit(out, to_csv({"trial", "phi", "accept_prob", "decision"}, rows));
      return 0;
    };
  });

  // estimate -----------------------------------------------------------
  auto* est = app.add_subcommand("estimate", "Sublinear block-polynomial estimator");
  std::string est_poly, est_input, est_mode = "main";
  double est_eps = 0.1, est_delta = 0.0;
  int est_reps = 16;
  bool est_no_audit = false;
  est->add_option("--poly", est_poly, "Block polynomial JSON file")->required();
  est->add_option("--input", est_input, "Assignment JSON file {\"blocks\": [[...], ...]}")
      ->required();
  est->add_option("--eps", est_eps, "Accuracy target")->capture_default_str();
  est->add_option("--mode", est_mode, "main | warmup")->capture_default_str();
  est->add_option("--reps", est_reps, "Repetitions")->capture_default_str();
  est->add_option("--delta", est_delta, "Explicit balance-audit threshold (0 = derive)")
      ->capture_default_str();
  est->add_flag("--no-audit", est_no_audit, "Skip the balance audit");
  add_common(est);
  est->callback([&] {
    action = [&]() {
      const auto p = blockpoly_from_json(read_text_file(est_poly));
      const auto blocks = blocks_from_json(read_text_file(est_input));
      estimate_options opt;
      if (est_mode == "main") {
        opt.mode = estimator_mode::main;
      } else if (est_mode == "warmup") {
        opt.mode = estimator_mode::warmup;
      } else {
        throw value_error("mode must be main or warmup");
      }
      opt.repetitions = est_reps;
      opt.audit_balance = !est_no_audit;
      opt.audit_delta = est_delta;
      auto rng = make_rng(seed);
      const estimate_report rep = estimate_blockpoly(p, blocks, est_eps, rng, opt);
      json j;
      j["estimate"] = rep.estimate;
      j["queries_used"] = rep.queries_used;
      j["repetitions"] = rep.repetitions;
      j["per_repetition_values"] = rep.per_repetition_values;
      emit(out, j.dump(2) + "\n");
      return 0;
    };
  });

  // compile ------------------------------------------------------------
  auto* comp = app.add_subcommand("compile", "Compile a circuit into a function tuple");
  std::string comp_circuit;
  bool comp_layers = false;
  comp->add_option("--circuit", comp_circuit, "Circuit text file")->required();
  comp->add_flag("--layers", comp_layers, "Layer-packed compilation (<= 2*depth+1 functions)");
  add_common(comp);
  comp->callback([&] {
    action = [&]() {
      const circuit c = parse_circuit(read_text_file(comp_circuit));
      const compile_result r = comp_layers ? compile_layers(c) : compile_gatewise(c);
      emit(out, compile_result_json(r).dump(2) + "\n");
      return 0;
    };
  });

  // verify -------------------------------------------------------------
  auto* ver = app.add_subcommand("verify", "Check compiled functions against the circuit");
  std::string ver_circuit, ver_funcs;
  double ver_tol = 1e-9;
  ver->add_option("--circuit", ver_circuit, "Circuit text file")->required();
  ver->add_option("--funcs", ver_funcs, "Compiled-functions JSON file")->required();
  ver->add_option("--tol", ver_tol, "Residual tolerance")->capture_default_str();
  add_common(ver);
  ver->callback([&] {
    action = [&]() {
      const circuit c = parse_circuit(read_text_file(ver_circuit));
      const compile_result r = compile_result_from_json(read_text_file(ver_funcs));
      const double residual = verify_compilation(c, r);
      const bool ok = residual <= ver_tol;
      json j;
      j["residual"] = residual;
      j["tolerance"] = ver_tol;
      j["ok"] = ok;
      emit(out, j.dump(2) + "\n");
      return ok ? 0 : 2;
    };
  });

  // gaussian -----------------------------------------------------------
  auto* gauss = app.add_subcommand("gaussian", "Gaussian distinguishing episodes");
  int gauss_n = 6, gauss_t = 8;
  long long gauss_trials = 100;
  std::string gauss_strategy = "random-order", gauss_mix = "even";
  gauss->add_option("--n", gauss_n, "log2 of the vector dimension")->capture_default_str();
  gauss->add_option("--t", gauss_t, "Query budget per episode")->capture_default_str();
  gauss->add_option("--trials", gauss_trials, "Episodes")->capture_default_str();
  gauss->add_option("--strategy", gauss_strategy,
                    "random-order | alternating | likelihood-greedy")
      ->capture_default_str();
  gauss->add_option("--case-mix", gauss_mix, "even | uniform | forrelated")
      ->capture_default_str();
  add_common(gauss);
  gauss->callback([&] {
    action = [&]() {
      const auto vs = make_forrelation_vectors(gauss_n);
      const auto strategy = strategy_from_string(gauss_strategy);
      std::vector<std::vector<std::string>> rows;
      for (long long trial = 0; trial < gauss_trials; ++trial) {
        measure_kind truth;
        if (gauss_mix == "even") {
          truth = trial % 2 == 0 ? measure_kind::uniform : measure_kind::forrelated;
        } else {
          truth = measure_from_string(gauss_mix);
        }
        auto rng = derive_rng(seed, static_cast<std::uint64_t>(trial));
        const episode_result ep = run_episode(vs, strategy, gauss_t, truth, rng);
        rows.push_back({std::to_string(trial), to_string(ep.truth), std::to_string(ep.queries),
                        format_double(ep.delta_u), format_double(ep.delta_f),
                        format_double(std::exp(ep.log_likelihood_ratio)),
                        ep.guess_structured ? "1" : "0"});
      }
      emit(out, to_csv({"trial", "case", "t", "delta_u", "delta_f", "lr", "guess"}, rows));
      return 0;
    };
  });

  // fsample ------------------------------------------------------------
  auto* fs = app.add_subcommand("fsample", "Spectrum sampling and the relation task");
  std::string fs_in;
  long long fs_draws = 1000;
  double fs_relation = 0.0;
  fs->add_option("--in", fs_in, "Value-table JSON file")->required();
  fs->add_option("--draws", fs_draws, "Number of draws")->capture_default_str();
  fs->add_option("--relation", fs_relation, "Run the relation task at this threshold");
  add_common(fs);
  fs->callback([&] {
    action = [&]() {
      const auto f = truth_table_from_json(read_text_file(fs_in));
      auto rng = make_rng(seed);
      if (fs_relation > 0.0) {
        long long hits = 0;
        for (long long d = 0; d < fs_draws; ++d) {
          hits += relation_solve(f, fs_relation, relation_strategy::quantum, rng).success;
        }
        const auto zero = relation_solve(f, fs_relation, relation_strategy::zero_query, rng);
        json j;
        j["threshold"] = fs_relation;
        j["draws"] = fs_draws;
        j["empirical_quantum_rate"] = static_cast<double>(hits) / static_cast<double>(fs_draws);
        j["exact_quantum_rate"] = relation_success_exact(f, fs_relation);
        j["zero_query_success"] = zero.success;
        emit(out, j.dump(2) + "\n");
        return 0;
      }
      std::vector<std::vector<std::string>> rows;
      for (long long d = 0; d < fs_draws; ++d) {
        rows.push_back({std::to_string(d), std::to_string(quantum_sample(f, rng))});
      }
      emit(out, to_csv({"draw", "y"}, rows));
      return 0;
    };
  });

  // experiment ----------------------------------------------------------
  auto* exp = app.add_subcommand("experiment", "Run a named benchmark experiment");
  experiment_config cfg;
  bool exp_list = false;
  exp->add_option("--name", cfg.name, "Experiment name");
  exp->add_option("--n", cfg.n, "Domain exponent override");
  exp->add_option("--k", cfg.k, "Tuple length override");
  exp->add_option("--eps", cfg.eps, "Accuracy / corruption parameter override");
  exp->add_option("--threshold", cfg.threshold, "Relation threshold override");
  exp->add_option("--trials", cfg.trials, "Trial count override");
  exp->add_option("--strategy", cfg.strategy, "Query strategy override");
  exp->add_flag("--list", exp_list, "List experiment names and exit");
  add_common(exp, /*with_format=*/true);
  exp->callback([&] {
    action = [&]() {
      if (exp_list) {
        std::string names;
        for (const auto& name : experiment_names()) names += name + "\n";
        emit(out, names);
        return 0;
      }
      if (cfg.name.empty()) throw value_error("--name is required (or use --list)");
      cfg.seed = seed;
      cfg.out_path = out;
      cfg.format = format;
      const experiment_report rep = run_experiment(cfg);
      std::cout << rep.summary_json;
      return rep.pass ? 0 : 2;
    };
  });

  try {
    app.parse(argc, argv);
    return action ? action() : 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const forrelab::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
