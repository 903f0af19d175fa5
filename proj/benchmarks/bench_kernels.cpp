#include <benchmark/benchmark.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "forrelab/blockpoly.hpp"
#include "forrelab/bqp_compiler.hpp"
#include "forrelab/estimators.hpp"
#include "forrelab/fourier_sampling.hpp"
#include "forrelab/gaussian_lab.hpp"
#include "forrelab/hadamard.hpp"
#include "forrelab/instances.hpp"
#include "forrelab/phi.hpp"
#include "forrelab/rng.hpp"

namespace {

using namespace forrelab;

std::vector<double> random_table(std::size_t len, rng_t& rng) {
  std::bernoulli_distribution coin(0.5);
  std::vector<double> f(len);
  for (double& v : f) v = coin(rng) ? 1.0 : -1.0;
  return f;
}

void BM_fwht(benchmark::State& state) {
  auto rng = make_rng(1);
  std::vector<double> v(std::size_t{1} << state.range(0));
  std::normal_distribution<double> gauss;
  for (double& x : v) x = gauss(rng);
  for (auto _ : state) {
    fwht_inplace(v);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(v.size()));
}
BENCHMARK(BM_fwht)->DenseRange(10, 18, 4);

void BM_phi_pipeline(benchmark::State& state) {
  auto rng = make_rng(2);
  const int n = static_cast<int>(state.range(0));
  instance_tuple t;
  t.n = n;
  for (int i = 0; i < 3; ++i) t.functions.push_back(random_table(std::size_t{1} << n, rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(phi(t).phi);
  }
}
BENCHMARK(BM_phi_pipeline)->DenseRange(8, 16, 4);

void BM_extract_and_balance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int N = 1 << n;
  auto rng = make_rng(3);
  Eigen::MatrixXd H(N, N);
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  for (int x = 0; x < N; ++x) {
    for (int y = 0; y < N; ++y) {
      H(x, y) = (std::popcount(static_cast<unsigned>(x & y)) & 1) != 0 ? -scale : scale;
    }
  }
  query_algorithm a;
  a.n = n;
  a.t = 1;
  a.input_length = N;
  a.unitaries = {H, H};
  a.query_index_map.resize(static_cast<std::size_t>(N));
  for (int s = 0; s < N; ++s) a.query_index_map[static_cast<std::size_t>(s)] = s;
  a.accepting_states = {0};
  const double delta = 0.04 / N;
  balance_options opt;
  opt.boundedness_samples = 4;
  for (auto _ : state) {
    const auto ex = from_query_algorithm(a);
    const auto bal = balance(ex.poly, delta, opt);
    benchmark::DoNotOptimize(bal.poly.term_count());
  }
  (void)rng;
}
BENCHMARK(BM_extract_and_balance)->DenseRange(3, 5, 1);

void BM_estimate_blockpoly(benchmark::State& state) {
  const int n = 5;
  const int N = 1 << n;
  auto rng = make_rng(4);
  Eigen::MatrixXd H(N, N);
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  for (int x = 0; x < N; ++x) {
    for (int y = 0; y < N; ++y) {
      H(x, y) = (std::popcount(static_cast<unsigned>(x & y)) & 1) != 0 ? -scale : scale;
    }
  }
  query_algorithm a;
  a.n = n;
  a.t = 1;
  a.input_length = N;
  a.unitaries = {H, H};
  a.query_index_map.resize(static_cast<std::size_t>(N));
  for (int s = 0; s < N; ++s) a.query_index_map[static_cast<std::size_t>(s)] = s;
  a.accepting_states = {0};
  const double eps = 0.2;
  const auto ex = from_query_algorithm(a);
  balance_options bopt;
  bopt.boundedness_samples = 4;
  const auto bal = balance(ex.poly, eps * eps / N, bopt);
  const auto X = random_table(static_cast<std::size_t>(N), rng);
  const auto assignment = repeated_assignment(ex, X);
  const std::vector<std::vector<int>> positions(static_cast<std::size_t>(bal.poly.k),
                                                ex.variable_position);
  estimate_options opt;
  opt.repetitions = 16;
  opt.audit_balance = false;
  for (auto _ : state) {
    const auto rep = estimate_blockpoly(bal.poly, assignment, eps, rng, opt, &bal.trace, &positions);
    benchmark::DoNotOptimize(rep.estimate);
  }
}
BENCHMARK(BM_estimate_blockpoly);

void BM_gs_update(benchmark::State& state) {
  const int t = static_cast<int>(state.range(0));
  const auto vs = make_forrelation_vectors(8);
  auto rng = make_rng(5);
  std::normal_distribution<double> gauss;
  for (auto _ : state) {
    state.PauseTiming();
    auto tr = make_transcript(vs);
    std::vector<int> ids(vs.count());
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    state.ResumeTiming();
    for (int i = 0; i < t; ++i) {
      gs_update(tr, ids[static_cast<std::size_t>(i)], gauss(rng));
    }
    benchmark::DoNotOptimize(tr.delta_f);
  }
  state.SetItemsProcessed(state.iterations() * t);
}
BENCHMARK(BM_gs_update)->Arg(16)->Arg(64)->Arg(128);

void BM_compile_layers(benchmark::State& state) {
  const std::string text =
      "H 0 1 2 3\n"
      "CZ 0 1 | CZ 2 3\n"
      "H 0 2 | CCZ 1 3 4\n"
      "CZ 1 2\n"
      "H 1 3 | CZ 0 4\n"
      "CCZ 0 1 2\n"
      "H 0 1 2 3 4\n";
  const circuit c = parse_circuit(text);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compile_layers(c).functions.size());
  }
}
BENCHMARK(BM_compile_layers);

void BM_quantum_sample(benchmark::State& state) {
  auto rng = make_rng(6);
  const auto f = random_table(std::size_t{1} << 10, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(quantum_sample(f, rng));
  }
}
BENCHMARK(BM_quantum_sample);

}  // namespace

BENCHMARK_MAIN();
