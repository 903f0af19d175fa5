#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "doctest.h"
#include "forrelab/errors.hpp"
#include "forrelab/fourier_sampling.hpp"
#include "forrelab/hadamard.hpp"
#include "forrelab/rng.hpp"
#include "test_util.hpp"

using namespace forrelab;

TEST_CASE("exact_distribution: pinned spectra") {
  SUBCASE("constant +1 is a point mass at 0") {
    const auto d = exact_distribution(std::vector<double>(8, 1.0));
    CHECK(d.n == 3);
    CHECK(d.probabilities[0] == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t y = 1; y < 8; ++y) CHECK(d.probabilities[y] == 0.0);
  }
  SUBCASE("character (-1)^(x.s) is a point mass at s") {
    const int s = 5;
    std::vector<double> f(8);
    for (int x = 0; x < 8; ++x) {
      f[static_cast<std::size_t>(x)] = ((std::popcount(static_cast<unsigned>(x & s)) & 1) != 0) ? -1.0 : 1.0;
    }
    const auto d = exact_distribution(f);
    for (int y = 0; y < 8; ++y) {
      CHECK(d.probabilities[static_cast<std::size_t>(y)] ==
            doctest::Approx(y == s ? 1.0 : 0.0).epsilon(1e-14));
    }
  }
  SUBCASE("n=2 table (1,1,1,-1) is uniform") {
    const auto d = exact_distribution({1.0, 1.0, 1.0, -1.0});
    for (double p : d.probabilities) CHECK(p == doctest::Approx(0.25).epsilon(1e-14));
  }
}

TEST_CASE("exact_distribution: normalization and validation") {
  auto rng = make_rng(101);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = rep % 11;
    const auto f = testutil::random_boolean_table(std::size_t{1} << n, rng);
    const auto d = exact_distribution(f);
    CHECK(d.n == n);
    double total = 0.0;
    for (double p : d.probabilities) total += p;
    CHECK(std::abs(total - 1.0) <= 1e-12);
    CHECK_NOTHROW(validate_distribution(d));
  }

  CHECK_THROWS_AS(exact_distribution({1.0, 0.5, 1.0, -1.0}), value_error);
  CHECK_THROWS_AS(exact_distribution({1.0, 1.0, -1.0}), shape_error);
  CHECK_THROWS_AS(validate_distribution({1, {0.5, 0.6}}), value_error);
  CHECK_THROWS_AS(validate_distribution({1, {1.5, -0.5}}), value_error);
  CHECK_THROWS_AS(validate_distribution({2, {0.5, 0.5}}), shape_error);
}

TEST_CASE("tv_distance: pinned values and domain checks") {
  const output_distribution a{1, {1.0, 0.0}};
  const output_distribution b{1, {0.0, 1.0}};
  const output_distribution c{1, {0.75, 0.25}};
  const output_distribution half{1, {0.5, 0.5}};
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(tv_distance(a, b) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tv_distance(half, c) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(tv_distance(a, c) == doctest::Approx(0.25).epsilon(1e-14));
  const output_distribution wide{2, {0.25, 0.25, 0.25, 0.25}};
  CHECK_THROWS_AS(tv_distance(a, wide), shape_error);
}

TEST_CASE("quantum_sample: point masses and empirical convergence") {
  auto rng = make_rng(202);
  for (int rep = 0; rep < 100; ++rep) {
    CHECK(quantum_sample(std::vector<double>(16, 1.0), rng) == 0);
  }
  std::vector<double> character(8);
  for (int x = 0; x < 8; ++x) {
    character[static_cast<std::size_t>(x)] = ((std::popcount(static_cast<unsigned>(x & 6)) & 1) != 0) ? -1.0 : 1.0;
  }
  for (int rep = 0; rep < 100; ++rep) {
    CHECK(quantum_sample(character, rng) == 6);
  }

  const int n = 3;
  const auto f = testutil::random_boolean_table(std::size_t{1} << n, rng);
  const auto d = exact_distribution(f);
  const int samples = 100000;
  output_distribution emp{n, std::vector<double>(std::size_t{1} << n, 0.0)};
  for (int s = 0; s < samples; ++s) {
    const int y = quantum_sample(f, rng);
    CHECK(d.probabilities[static_cast<std::size_t>(y)] > 0.0);
    emp.probabilities[static_cast<std::size_t>(y)] += 1.0 / samples;
  }
  const double tv = tv_distance(emp, d);
  CHECK(tv <= 0.01);
  CHECK(tv <= 3.0 * std::sqrt(static_cast<double>(std::size_t{1} << n) / samples));
}

TEST_CASE("quantum_sample: deterministic under a fixed seed") {
  auto rng_a = make_rng(7);
  const auto f = testutil::random_boolean_table(64, rng_a);
  auto rng_c = make_rng(7);
  testutil::random_boolean_table(64, rng_c);  // advance to match rng_a
  for (int rep = 0; rep < 200; ++rep) {
    CHECK(quantum_sample(f, rng_a) == quantum_sample(f, rng_c));
  }
}

TEST_CASE("relation_solve: structure and pinned small cases") {
  auto rng = make_rng(303);
  const std::vector<double> f{1.0, 1.0, 1.0, -1.0};  // unitary spectrum is +-1 everywhere

  auto q = relation_solve(f, 1.0, relation_strategy::quantum, rng);
  CHECK(q.queries == 1);
  CHECK(q.success);
  CHECK(relation_success_exact(f, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(relation_success_exact(f, 1.0 + 1e-9) == 0.0);

  auto z = relation_solve(f, 1.0, relation_strategy::zero_query, rng);
  CHECK(z.queries == 0);
  CHECK(z.y == 0);
  CHECK(z.success);  // |fhat_unit(0)| = 1 >= 1

  const std::vector<double> constant(4, 1.0);
  CHECK(relation_solve(constant, 1.0, relation_strategy::zero_query, rng).success);
  CHECK(relation_success_exact(constant, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(relation_success_exact(constant, 2.0 + 1e-9) == 0.0);

  CHECK_THROWS_AS(relation_solve(f, 0.0, relation_strategy::quantum, rng), value_error);
  CHECK_THROWS_AS(relation_solve(f, -0.5, relation_strategy::zero_query, rng), value_error);
  CHECK_THROWS_AS(relation_success_exact(f, 0.0), value_error);
  CHECK_THROWS_AS(relation_solve({1.0, 0.5}, 1.0, relation_strategy::quantum, rng), value_error);
}

TEST_CASE("relation_solve: sampler-free identity on random tables") {
  auto rng = make_rng(404);
  for (int rep = 0; rep < 20; ++rep) {
    const auto f = testutil::random_boolean_table(64, rng);
    const double c = 0.1 + 1.2 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double exact = relation_success_exact(f, c);

    // The exact value must agree with a direct evaluation over the spectrum.
    const auto d = exact_distribution(f);
    const auto fhat = fwht(f);
    double direct = 0.0;
    for (std::size_t y = 0; y < fhat.size(); ++y) {
      if (std::abs(fhat[y]) >= c) direct += d.probabilities[y];
    }
    CHECK(exact == doctest::Approx(direct).epsilon(1e-14));

    // ... and with the empirical rate of the sampling solver.
    const int trials = 2000;
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
      if (relation_solve(f, c, relation_strategy::quantum, rng).success) ++hits;
    }
    const double rate = static_cast<double>(hits) / trials;
    const double se = std::sqrt(std::max(exact * (1.0 - exact), 1e-4) / trials);
    CHECK(std::abs(rate - exact) <= 5.0 * se + 1e-9);
  }
}

TEST_CASE("relation_solve: threshold-1 success rates at n=10") {
  const int n = 10;
  const int trials = 20000;
  int quantum_hits = 0;
  int zero_hits = 0;
  for (int t = 0; t < trials; ++t) {
    auto rng = derive_rng(909, static_cast<std::uint64_t>(t));
    const auto f = testutil::random_boolean_table(std::size_t{1} << n, rng);
    if (relation_solve(f, 1.0, relation_strategy::quantum, rng).success) ++quantum_hits;
    if (relation_solve(f, 1.0, relation_strategy::zero_query, rng).success) ++zero_hits;
  }
  const double quantum_rate = static_cast<double>(quantum_hits) / trials;
  const double zero_rate = static_cast<double>(zero_hits) / trials;
  // Gaussian limits: E[g^2 1{|g|>=1}] ~ 0.801 and P(|g|>=1) ~ 0.317 for g ~ N(0,1).
  CHECK(quantum_rate > 0.78);
  CHECK(quantum_rate < 0.82);
  CHECK(zero_rate > 0.30);
  CHECK(zero_rate < 0.36);
  CHECK(quantum_rate - zero_rate > 0.4);
}

TEST_CASE("relation_solve: vanishing threshold") {
  auto rng = make_rng(505);
  const int n = 6;
  int zero_hits = 0;
  int balanced = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const auto f = testutil::random_boolean_table(std::size_t{1} << n, rng);
    // Quantum outcomes are drawn from the spectrum's support, so any positive
    // threshold below the minimum nonzero amplitude 1/sqrt(N) always succeeds.
    CHECK(relation_solve(f, 1e-9, relation_strategy::quantum, rng).success);
    const bool hit = relation_solve(f, 1e-9, relation_strategy::zero_query, rng).success;
    if (hit) ++zero_hits;
    double sum = 0.0;
    for (double v : f) sum += v;
    if (sum == 0.0) ++balanced;
    // The zero-query strategy fails exactly on balanced tables.
    CHECK(hit == (sum != 0.0));
  }
  CHECK(zero_hits == 500 - balanced);
  CHECK(zero_hits >= 425);  // balanced fraction at N=64 is about 0.1
}
