// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "jumpmetrics/agreement.hpp"

using namespace jm;

namespace {

// Independent oracle: two-way ANOVA by explicit sums of squares over all
// cells, composed into the single-measurement absolute-agreement ICC.
double oracle_icc_2_1(const std::vector<std::vector<double>>& m) {
  const std::size_t n = m.size(), k = m.front().size();
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) grand += m[i][j];
  grand /= static_cast<double>(n * k);

  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double rm = 0.0;
    for (std::size_t j = 0; j < k; ++j) rm += m[i][j];
    rm /= static_cast<double>(k);
    ssr += static_cast<double>(k) * (rm - grand) * (rm - grand);
  }
  double ssc = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double cm = 0.0;
    for (std::size_t i = 0; i < n; ++i) cm += m[i][j];
    cm /= static_cast<double>(n);
    ssc += static_cast<double>(n) * (cm - grand) * (cm - grand);
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double rm = 0.0;
    for (std::size_t j = 0; j < k; ++j) rm += m[i][j];
    rm /= static_cast<double>(k);
    for (std::size_t j = 0; j < k; ++j) {
      double cm = 0.0;
      for (std::size_t i2 = 0; i2 < n; ++i2) cm += m[i2][j];
      cm /= static_cast<double>(n);
      const double e = m[i][j] - rm - cm + grand;
      sse += e * e;
    }
  }
  const double msr = ssr / static_cast<double>(n - 1);
  const double msc = ssc / static_cast<double>(k - 1);
  const double mse = sse / static_cast<double>((n - 1) * (k - 1));
  return (msr - mse) /
         (msr + static_cast<double>(k - 1) * mse +
          static_cast<double>(k) / static_cast<double>(n) * (msc - mse));
}

std::vector<std::vector<double>> random_matrix(std::mt19937& rng, std::size_t n, std::size_t k) {
  std::uniform_int_distribution<int> cell(0, 30);
  std::vector<std::vector<double>> m(n, std::vector<double>(k));
  for (auto& row : m)
    for (double& v : row) v = static_cast<double>(cell(rng));
  return m;
}

}  // namespace

TEST_CASE("icc_2_1 of two identical columns is 1") {
  const std::vector<std::vector<double>> m{{1.0, 1.0}, {5.0, 5.0}, {9.0, 9.0}, {2.0, 2.0}};
  CHECK(icc_2_1_value(m) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("icc_2_1 goes to zero under a dominating constant offset") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> m;
  for (int i = 0; i < 10; ++i) {
    const double x = u(rng);
    m.push_back({x, x + 1000.0});
  }
  const double icc = icc_2_1_value(m);
  CHECK(icc >= 0.0);
  CHECK(icc < 0.01);
}

TEST_CASE("icc_2_1 matches the brute-force ANOVA oracle on a random 6x4 matrix") {
  std::mt19937 rng(101);
  const auto m = random_matrix(rng, 6, 4);
  CHECK(std::fabs(icc_2_1_value(m) - oracle_icc_2_1(m)) <= 1e-10);
}

TEST_CASE("icc_2_1 matches the oracle across many random shapes") {
  std::mt19937 rng(4242);
  std::uniform_int_distribution<std::size_t> nn(3, 10), kk(2, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = random_matrix(rng, nn(rng), kk(rng));
    const double got = icc_2_1_value(m);
    const double want = oracle_icc_2_1(m);
    CHECK(std::fabs(got - want) <= 1e-10);
  }
}

TEST_CASE("icc_2_1 is invariant to common shifts and positive scaling") {
  std::mt19937 rng(55);
  const auto m = random_matrix(rng, 8, 3);
  const double base = icc_2_1_value(m);
  auto shifted = m;
  for (auto& row : shifted)
    for (double& v : row) v += 123.456;
  CHECK(std::fabs(icc_2_1_value(shifted) - base) <= 1e-10);
  auto scaled = m;
  for (auto& row : scaled)
    for (double& v : row) v *= 7.25;
  CHECK(std::fabs(icc_2_1_value(scaled) - base) <= 1e-10);
}

TEST_CASE("icc_2_1 input validation") {
  CHECK_THROWS_AS(icc_2_1_value({{1.0, 2.0}}), Error);                       // n < 2
  CHECK_THROWS_AS(icc_2_1_value({{1.0}, {2.0}}), Error);                     // k < 2
  CHECK_THROWS_AS(icc_2_1_value({{1.0, 2.0}, {3.0}}), Error);                // ragged
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(icc_2_1_value({{1.0, 2.0}, {nan, 3.0}}), Error);           // missing cell
}

TEST_CASE("bland_altman of identical series is zero bias and zero width") {
  const std::vector<double> a{4.0, 7.0, 9.0};
  const BlandAltmanResult r = bland_altman(a, a);
  CHECK(r.bias_cm == 0.0);
  CHECK(r.sd_cm == 0.0);
  CHECK(r.loa_low_cm == 0.0);
  CHECK(r.loa_high_cm == 0.0);
  CHECK(r.n == 3);
}

TEST_CASE("bland_altman hand-computed example") {
  const std::vector<double> a{1.0, 3.0};
  const std::vector<double> b{0.0, 0.0};
  const BlandAltmanResult r = bland_altman(a, b);
  CHECK(r.bias_cm == doctest::Approx(2.0));
  CHECK(r.sd_cm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.loa_low_cm == doctest::Approx(2.0 - 1.96 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.loa_high_cm == doctest::Approx(2.0 + 1.96 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("bland_altman bias is antisymmetric and the LOA width is 2*1.96*sd") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(5.0, 40.0);
  std::vector<double> a(12), b(12);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
  }
  const BlandAltmanResult ab = bland_altman(a, b);
  const BlandAltmanResult ba = bland_altman(b, a);
  CHECK(ab.bias_cm == -ba.bias_cm);
  CHECK(ab.sd_cm == ba.sd_cm);
  CHECK(ab.loa_high_cm - ab.loa_low_cm == doctest::Approx(2.0 * 1.96 * ab.sd_cm).epsilon(1e-12));
  // mean(a) - mean(b) equals the bias exactly
  CHECK(mean(a) - mean(b) == doctest::Approx(ab.bias_cm).epsilon(1e-12));
}

TEST_CASE("bland_altman rejects mismatched pairings") {
  bool pairing_error = false;
  try {
    bland_altman(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0, 3.0});
  } catch (const Error& e) {
    pairing_error = e.code() == errc::pairing;
  }
  CHECK(pairing_error);
}

TEST_CASE("test_retest_reliability is 1 when every target repeats itself") {
  const std::vector<std::vector<double>> rows{{20.0, 20.0, 20.0},
                                              {15.0, 15.0, 15.0},
                                              {31.0, 31.0, 31.0}};
  CHECK(test_retest_reliability(rows) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("test_retest_reliability drops incomplete rows and matches the oracle") {
  std::mt19937 rng(88);
  auto rows = random_matrix(rng, 5, 3);
  auto with_gap = rows;
  with_gap.push_back({1.0, std::numeric_limits<double>::quiet_NaN(), 2.0});
  CHECK(std::fabs(test_retest_reliability(with_gap) - oracle_icc_2_1(rows)) <= 1e-10);
}

TEST_CASE("test_retest_reliability needs at least two complete targets") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  bool input_error = false;
  try {
    test_retest_reliability({{1.0, 2.0, 3.0}, {nan, 2.0, 3.0}});
  } catch (const Error& e) {
    input_error = e.code() == errc::input;
  }
  CHECK(input_error);
}
