// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "jumpmetrics/resample.hpp"

using namespace jm;

namespace {

TimeSeries series(std::vector<double> v, double rate = 30.0) {
  return {std::move(v), rate, Unit::Pixels};
}

}  // namespace

TEST_CASE("fft_resample keeps a constant series constant") {
  const TimeSeries out = fft_resample(series(std::vector<double>(30, 7.25)), 100);
  REQUIRE(out.size() == 100);
  for (double v : out.samples) CHECK(v == doctest::Approx(7.25).epsilon(1e-12));
  CHECK(out.rate_hz == doctest::Approx(100.0));
}

TEST_CASE("fft_resample reproduces a pure sinusoid on the finer grid") {
  // 2 cycles over 30 samples -> 2 cycles over 100 samples.
  std::vector<double> in(30);
  for (std::size_t i = 0; i < in.size(); ++i)
    in[i] = 1.7 * std::sin(2.0 * std::numbers::pi * 2.0 * static_cast<double>(i) / 30.0) + 0.4;
  const TimeSeries out = fft_resample(series(in), 100);
  REQUIRE(out.size() == 100);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double expect =
        1.7 * std::sin(2.0 * std::numbers::pi * 2.0 * static_cast<double>(i) / 100.0) + 0.4;
    CHECK(out.samples[i] == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("fft_resample round-trips band-limited input") {
  std::vector<double> in(30);
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double t = static_cast<double>(i) / 30.0;
    in[i] = std::sin(2.0 * std::numbers::pi * 3.0 * t) + 0.5 * std::cos(2.0 * std::numbers::pi * 5.0 * t);
  }
  const TimeSeries up = fft_resample(series(in), 100);
  const TimeSeries back = fft_resample(up, 30);
  for (std::size_t i = 0; i < in.size(); ++i)
    CHECK(back.samples[i] == doctest::Approx(in[i]).epsilon(1e-9));
}

TEST_CASE("fft_resample preserves the mean to 1e-9 relative") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_int_distribution<std::size_t> len(3, 257);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> in(len(rng));
    for (double& v : in) v = u(rng) + 20.0;
    const std::size_t target = len(rng);
    const TimeSeries out = fft_resample(series(in), target);
    REQUIRE(out.size() == target);
    double m_in = 0.0, m_out = 0.0;
    for (double v : in) m_in += v;
    m_in /= static_cast<double>(in.size());
    for (double v : out.samples) m_out += v;
    m_out /= static_cast<double>(out.size());
    CHECK(std::fabs(m_out - m_in) <= 1e-9 * std::fabs(m_in));
  }
}

TEST_CASE("fft_resample rejects target lengths below 2") {
  CHECK_THROWS_AS(fft_resample(series({1.0, 2.0, 3.0}), 1), Error);
  try {
    fft_resample(series({1.0, 2.0, 3.0}), 0);
  } catch (const Error& e) {
    CHECK(e.code() == errc::argument);
  }
}
