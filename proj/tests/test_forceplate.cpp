// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "jumpmetrics/forceplate.hpp"
#include "jumpmetrics/synth.hpp"

using namespace jm;

namespace {

ForceTrace trace(std::vector<double> v, double rate = 1000.0) {
  return {{std::move(v), rate, Unit::Newtons}};
}

ForceTrace square_jump(double stance_n, std::size_t stance_samples, std::size_t flight_samples,
                       double noise_sd, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sd);
  std::vector<double> f;
  const auto add = [&](double level, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) f.push_back(level + (noise_sd > 0.0 ? noise(rng) : 0.0));
  };
  add(stance_n, stance_samples);
  add(0.0, flight_samples);
  add(stance_n, stance_samples);
  return trace(std::move(f));
}

}  // namespace

TEST_CASE("detect_flight_windows finds an exact 400 ms unload") {
  const ForceTrace t = square_jump(600.0, 500, 400, 1.0, 19);
  const std::vector<FlightWindow> windows = detect_flight_windows(t);
  REQUIRE(windows.size() == 1);
  CHECK(std::fabs(windows[0].flight_time_s - 0.400) <= 0.002);
  CHECK(windows[0].landing_index > windows[0].toe_off_index);
}

TEST_CASE("detect_flight_windows is exact on a noiseless square trace") {
  const ForceTrace t = square_jump(600.0, 500, 400, 0.0, 0);
  const std::vector<FlightWindow> windows = detect_flight_windows(t);
  REQUIRE(windows.size() == 1);
  CHECK(windows[0].flight_time_s == doctest::Approx(0.400).epsilon(1e-9));
}

TEST_CASE("detected flight time is within one sample of truth for noise up to 2 N") {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const ForceTrace t = square_jump(750.0, 600, 350, 2.0, seed);
    const std::vector<FlightWindow> windows = detect_flight_windows(t);
    REQUIRE(windows.size() == 1);
    CHECK(std::fabs(windows[0].flight_time_s - 0.350) <= 0.001 + 1e-12);
    CHECK(windows[0].flight_time_s ==
          static_cast<double>(windows[0].landing_index - windows[0].toe_off_index) / t.rate_hz());
  }
}

TEST_CASE("window count equals repetition count on synthetic multi-rep traces") {
  SynthJumpSpec spec;
  spec.reps = 3;
  spec.noise_n_sd = 2.0;
  spec.seed = 77;
  const SynthSession session = generate(spec);
  const std::vector<FlightWindow> windows = detect_flight_windows(session.force);
  CHECK(windows.size() == session.truth.reps.size());
  for (std::size_t i = 0; i < windows.size(); ++i)
    CHECK(std::fabs(windows[i].flight_time_s - session.truth.reps[i].flight_time_s) <= 0.004);
}

TEST_CASE("an all-zero trace has no stance and is a signal error") {
  bool signal_error = false;
  try {
    detect_flight_windows(trace(std::vector<double>(1000, 0.0)));
  } catch (const Error& e) {
    signal_error = e.code() == errc::signal;
  }
  CHECK(signal_error);
}

TEST_CASE("a stance-only trace has no flight") {
  bool no_flight = false;
  try {
    detect_flight_windows(trace(std::vector<double>(1000, 620.0)));
  } catch (const Error& e) {
    no_flight = e.code() == errc::no_flight;
  }
  CHECK(no_flight);
}

TEST_CASE("implausibly short or long unloads are discarded") {
  // 50 ms unload: below the 100 ms plausibility floor.
  bool no_flight = false;
  try {
    detect_flight_windows(square_jump(600.0, 500, 50, 0.0, 0));
  } catch (const Error& e) {
    no_flight = e.code() == errc::no_flight;
  }
  CHECK(no_flight);
}

TEST_CASE("height_from_flight_time follows the quadratic law exactly") {
  Constants c;
  const double h1 = height_from_flight_time(0.4, c);
  const double h2 = height_from_flight_time(0.8, c);
  CHECK(h2 == 4.0 * h1);
  CHECK(h1 == doctest::Approx(19.62).epsilon(1e-12));
  CHECK(height_from_flight_time(0.45, c) == doctest::Approx(100.0 * 9.81 * 0.2025 / 8.0).epsilon(1e-14));
  CHECK(height_from_flight_time(0.45, c) == doctest::Approx(24.83).epsilon(1e-3));
}

TEST_CASE("height_from_flight_time rejects non-positive flight times") {
  CHECK_THROWS_AS(height_from_flight_time(0.0), Error);
  CHECK_THROWS_AS(height_from_flight_time(-0.1), Error);
  try {
    height_from_flight_time(0.0);
  } catch (const Error& e) {
    CHECK(e.code() == errc::argument);
  }
}
