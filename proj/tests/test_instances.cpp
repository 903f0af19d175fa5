#include "forrelab/instances.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "forrelab/errors.hpp"
#include "forrelab/hadamard.hpp"
#include "forrelab/phi.hpp"
#include "forrelab/rng.hpp"
#include "test_util.hpp"

using namespace forrelab;

TEST_CASE("forrelated pair: g is exactly the transform of f") {
  rng_t rng = make_rng(21);
  const instance_tuple t = sample_real_pair(6, measure_kind::forrelated, rng);
  CHECK(t.label == measure_kind::forrelated);
  CHECK(testutil::max_abs_diff(t.functions[1], fwht(t.functions[0])) < kExactTol);
}

TEST_CASE("uniform pair: f and g entries are uncorrelated") {
  const int trials = 10000;
  double sum_fg = 0.0, sum_f = 0.0, sum_g = 0.0;
  for (int i = 0; i < trials; ++i) {
    rng_t rng = derive_rng(500, i);
    const instance_tuple t = sample_real_pair(6, measure_kind::uniform, rng);
    const double f = t.functions[0][1];
    const double g = t.functions[1][2];
    sum_fg += f * g;
    sum_f += f;
    sum_g += g;
  }
  const double cov = sum_fg / trials - (sum_f / trials) * (sum_g / trials);
  CHECK(std::abs(cov) <= 0.05);
}

TEST_CASE("sign_round") {
  CHECK(sign_round(std::vector<double>{0.3, -1.2, 2.0, -0.1}) ==
        std::vector<double>{1.0, -1.0, 1.0, -1.0});
  CHECK(sign_round(std::vector<double>{0.5, 1.0, 2.0}) == std::vector<double>{1.0, 1.0, 1.0});
  // Ties at zero map to +1.
  CHECK(sign_round(std::vector<double>{0.0, -0.0})[0] == 1.0);
  // Idempotent on +-1 inputs.
  const std::vector<double> pm{1.0, -1.0, -1.0, 1.0};
  CHECK(sign_round(pm) == pm);
}

TEST_CASE("sign-rounded forrelated pairs concentrate near 2/pi") {
  // Smoke-scale version; the acceptance suite runs n=10 with 2000 trials.
  const int trials = 500;
  double mean = 0.0;
  for (int i = 0; i < trials; ++i) {
    rng_t rng = derive_rng(600, i);
    const instance_tuple t = sign_round(sample_real_pair(8, measure_kind::forrelated, rng));
    mean += phi(t).phi;
  }
  mean /= trials;
  CHECK(mean > 0.58);
  CHECK(mean < 0.70);
}

TEST_CASE("multipliers of the all-ones prefix at n=2") {
  const std::vector<double> c = multipliers({std::vector<double>(4, 1.0)});
  CHECK(c[0] == doctest::Approx(2.0).epsilon(1e-12));
  for (int i = 1; i < 4; ++i) CHECK(std::abs(c[i]) < kExactTol);
}

TEST_CASE("multipliers always satisfy sum c^2 = N") {
  for (int trial = 0; trial < 50; ++trial) {
    rng_t rng = derive_rng(700, trial);
    const int n = 2 + static_cast<int>(derive_seed(3, trial) % 7);
    const int prefix_len = 1 + static_cast<int>(derive_seed(4, trial) % 3);
    std::vector<std::vector<double>> prefix;
    for (int i = 0; i < prefix_len; ++i) {
      prefix.push_back(testutil::random_boolean_table(std::size_t{1} << n, rng));
    }
    const std::vector<double> c = multipliers(prefix);
    const double sum_sq = std::inner_product(c.begin(), c.end(), c.begin(), 0.0);
    CHECK(std::abs(sum_sq - double(std::size_t{1} << n)) < 1e-9);
  }
}

TEST_CASE("multiplier entries obey the log bound with high frequency") {
  const int trials = 500;
  int within = 0;
  for (int trial = 0; trial < trials; ++trial) {
    rng_t rng = derive_rng(800, trial);
    const std::vector<double> c = multipliers({testutil::random_boolean_table(1024, rng)});
    double max_abs = 0.0;
    for (double v : c) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs <= 10.0) ++within;  // log2(1024) = 10
  }
  CHECK(within >= trials * 99 / 100);
}

TEST_CASE("multipliers requires a nonempty prefix") {
  CHECK_THROWS_AS(multipliers({}), value_error);
}

TEST_CASE("k-fold hybrid construction") {
  SUBCASE("k=2 reduces to the plain pair") {
    rng_t rng = make_rng(31);
    const instance_tuple t = sample_kfold_hybrid(4, 2, measure_kind::forrelated, rng);
    CHECK(t.k() == 2);
    CHECK(testutil::max_abs_diff(t.functions[1], fwht(t.functions[0])) < kExactTol);
  }
  SUBCASE("k=3 last function is the twisted transform") {
    rng_t rng = make_rng(32);
    const instance_tuple t = sample_kfold_hybrid(4, 3, measure_kind::forrelated, rng);
    CHECK(t.k() == 3);
    for (double v : t.functions[0]) CHECK(std::abs(v) == 1.0);
    const std::vector<double> c = multipliers({t.functions[0]});
    const std::vector<double> expected = fwht(apply_phase(t.functions[1], c));
    CHECK(testutil::max_abs_diff(t.functions[2], expected) < kExactTol);
  }
  SUBCASE("k=3 sign-rounded hybrids concentrate near 2/pi (smoke scale)") {
    const int trials = 500;
    double mean = 0.0;
    for (int i = 0; i < trials; ++i) {
      rng_t rng = derive_rng(900, i);
      const instance_tuple t =
          sign_round(sample_kfold_hybrid(8, 3, measure_kind::forrelated, rng));
      mean += phi(t).phi;
    }
    mean /= trials;
    CHECK(mean > 0.55);
    CHECK(mean < 0.71);
  }
}

TEST_CASE("corrupt") {
  rng_t gen = make_rng(41);
  const instance_tuple t = testutil::random_boolean_tuple(6, 2, gen);

  SUBCASE("eps=0 returns the identical tuple") {
    rng_t rng = make_rng(1);
    const instance_tuple c = corrupt(t, 0.0, rng);
    CHECK(c.functions == t.functions);
    CHECK(!c.label.has_value());
  }
  SUBCASE("changes at most round(eps*N) positions per function") {
    for (double eps : {0.1, 0.33, 0.8}) {
      rng_t rng = make_rng(2);
      const instance_tuple c = corrupt(t, eps, rng);
      const auto budget = static_cast<std::size_t>(std::llround(eps * 64.0));
      for (int j = 0; j < t.k(); ++j) {
        std::size_t changed = 0;
        for (std::size_t x = 0; x < 64; ++x) {
          if (c.functions[j][x] != t.functions[j][x]) ++changed;
        }
        CHECK(changed <= budget);
      }
    }
  }
  SUBCASE("eps=1 gives a fully uniform tuple: E[phi^2] near 1/N") {
    const int trials = 2000;
    double mean_sq = 0.0;
    for (int i = 0; i < trials; ++i) {
      rng_t rng = derive_rng(1000, i);
      const double p = phi(corrupt(t, 1.0, rng)).phi;
      mean_sq += p * p;
    }
    mean_sq /= trials;
    CHECK(mean_sq > 0.5 / 64.0);
    CHECK(mean_sq < 1.5 / 64.0);
  }
  SUBCASE("corrupted mean tracks (1-eps)^k phi (smoke scale)") {
    rng_t gen8 = make_rng(42);
    const instance_tuple base = testutil::random_boolean_tuple(8, 2, gen8);
    const double phi_f = phi(base).phi;
    const double eps = 0.1;
    const int trials = 1500;
    double mean = 0.0, mean_sq = 0.0;
    for (int i = 0; i < trials; ++i) {
      rng_t rng = derive_rng(1100, i);
      const double p = phi(corrupt(base, eps, rng)).phi;
      mean += p;
      mean_sq += p * p;
    }
    mean /= trials;
    mean_sq /= trials;
    const double se = std::sqrt(std::max(mean_sq - mean * mean, 0.0) / trials);
    CHECK(std::abs(mean - (1.0 - eps) * (1.0 - eps) * phi_f) <= 4.0 * se + 1e-9);
  }
  SUBCASE("requires a Boolean tuple") {
    instance_tuple real_t;
    real_t.n = 2;
    real_t.functions = {std::vector<double>{0.5, 1.0, -1.0, 1.0}};
    rng_t rng = make_rng(3);
    CHECK_THROWS_AS(corrupt(real_t, 0.5, rng), precondition_error);
  }
}

TEST_CASE("uniform Boolean pairs have E[phi^2] near 1/N (smoke scale)") {
  const int trials = 1500;
  double mean_sq = 0.0;
  for (int i = 0; i < trials; ++i) {
    rng_t rng = derive_rng(1200, i);
    const instance_tuple t = testutil::random_boolean_tuple(8, 2, rng);
    const double p = phi(t).phi;
    mean_sq += p * p;
  }
  mean_sq /= trials;
  CHECK(mean_sq > 0.6 / 256.0);
  CHECK(mean_sq < 1.4 / 256.0);
}

TEST_CASE("goodness of the constant pair at n=2, by hand") {
  instance_tuple t;
  t.n = 2;
  t.functions.assign(2, std::vector<double>(4, 1.0));
  const goodness_report rep = check_goodness(t);
  // Level 1 statevector is the first basis vector, so the scaled maximum sits
  // exactly on the log2(N) = 2 envelope and the strict flag fires.
  CHECK(rep.max_scaled_amplitude == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(!rep.amplitude_ok);
  for (std::size_t y = 1; y < 4; ++y) {
    CHECK(rep.balance_deviation[y] == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(!rep.good);
}

TEST_CASE("random tuples at n=10 pass the goodness envelopes with high frequency") {
  const int trials = 200;
  int amplitude_pass = 0;
  int balance_pass = 0;
  for (int i = 0; i < trials; ++i) {
    rng_t rng = derive_rng(1300, i);
    const instance_tuple t = testutil::random_boolean_tuple(10, 2, rng);
    const goodness_report rep = check_goodness(t);
    if (rep.amplitude_ok) ++amplitude_pass;
    if (rep.max_balance_deviation <= rep.balance_threshold) ++balance_pass;
  }
  CHECK(amplitude_pass >= trials * 95 / 100);
  CHECK(balance_pass >= trials * 95 / 100);
}
