// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "jumpmetrics/rescale.hpp"

using namespace jm;

namespace {

TimeSeries px(std::vector<double> v, double rate = 30.0) {
  return {std::move(v), rate, Unit::Pixels};
}

TimeSeries mm(std::vector<double> v, double rate = 100.0) {
  return {std::move(v), rate, Unit::Millimetres};
}

}  // namespace

TEST_CASE("minmax_normalize maps the range onto [0, 1]") {
  const TimeSeries out = minmax_normalize(px({2.0, 4.0, 6.0}));
  CHECK(out.samples[0] == 0.0);
  CHECK(out.samples[1] == 0.5);
  CHECK(out.samples[2] == 1.0);
  CHECK(out.unit == Unit::Normalized);

  const TimeSeries id = minmax_normalize(px({0.0, 1.0}));
  CHECK(id.samples[0] == 0.0);
  CHECK(id.samples[1] == 1.0);
}

TEST_CASE("minmax_normalize rejects constant series") {
  CHECK_THROWS_AS(minmax_normalize(px({5.0, 5.0, 5.0})), Error);
  try {
    minmax_normalize(px({5.0, 5.0, 5.0}));
  } catch (const Error& e) {
    CHECK(e.code() == errc::degenerate_range);
  }
}

TEST_CASE("reverse_minmax rescales into the reference range") {
  const TimeSeries out = reverse_minmax(px({0.0, 5.0, 10.0}), mm({100.0, 300.0}));
  CHECK(out.samples[0] == doctest::Approx(100.0));
  CHECK(out.samples[1] == doctest::Approx(200.0));
  CHECK(out.samples[2] == doctest::Approx(300.0));
  CHECK(out.unit == Unit::Millimetres);
}

TEST_CASE("reverse_minmax output range equals the reference range exactly") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> q(40), p(60);
    for (double& v : q) v = u(rng);
    for (double& v : p) v = 500.0 + 3.0 * u(rng);
    const TimeSeries out = reverse_minmax(px(q), mm(p));
    CHECK(std::fabs(min_value(out.samples) - min_value(p)) <= 1e-9);
    CHECK(std::fabs(max_value(out.samples) - max_value(p)) <= 1e-9);
  }
}

TEST_CASE("reverse_minmax is invariant to positive affine distortion of the input") {
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<double> q(50), p(50);
  for (double& v : q) v = u(rng);
  for (double& v : p) v = 200.0 + 2.0 * u(rng);
  const TimeSeries base = reverse_minmax(px(q), mm(p));
  for (const auto& [a, b] : {std::pair{2.0, 10.0}, std::pair{0.37, -40.0}, std::pair{15.0, 0.0}}) {
    std::vector<double> distorted(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) distorted[i] = a * q[i] + b;
    const TimeSeries out = reverse_minmax(px(distorted), mm(p));
    for (std::size_t i = 0; i < q.size(); ++i)
      CHECK(std::fabs(out.samples[i] - base.samples[i]) <= 1e-9 * std::max(1.0, std::fabs(base.samples[i])));
  }
}

TEST_CASE("reverse_minmax inverts an affine image of the reference") {
  std::vector<double> p{100.0, 180.0, 260.0, 240.0, 120.0};
  std::vector<double> q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[i] = 0.3 * p[i] - 17.0;  // affine distortion
  const TimeSeries out = reverse_minmax(px(q), mm(p));
  for (std::size_t i = 0; i < p.size(); ++i)
    CHECK(out.samples[i] == doctest::Approx(p[i]).epsilon(1e-9));
}

TEST_CASE("reverse_minmax rejects constant input") {
  CHECK_THROWS_AS(reverse_minmax(px({3.0, 3.0, 3.0}), mm({1.0, 2.0})), Error);
  CHECK_THROWS_AS(reverse_minmax(px({1.0, 2.0}), mm({5.0, 5.0})), Error);
}

TEST_CASE("fit_ptm_scale matches the closed-form arithmetic") {
  // T = 0.2 s at 30 fps is 6 frames; build a descent whose drop at frame 6 is
  // exactly 56 px, with the 40% fall fraction reached there and not before.
  const double apex = 100.0;
  std::vector<double> x{0.0, 30.0, 60.0, 90.0, apex};
  const std::size_t apex_index = 4;
  const double target = 0.4 * apex;  // amplitude is 100 px
  for (int k = 1; k <= 6; ++k) {
    const double frac = static_cast<double>(k) / 6.0;
    x.push_back(apex - 56.0 * frac * frac);  // quadratic drop hits 40 px just at k = 6
  }
  REQUIRE(apex - x[apex_index + 5] < target);
  REQUIRE(apex - x[apex_index + 6] >= target);

  const ScaleCalibration cal = fit_ptm_scale(px(x, 30.0), apex_index, Constants{});
  CHECK(cal.free_fall_duration_s == doctest::Approx(0.2));
  CHECK(cal.r_mm_per_px == doctest::Approx(500.0 * 0.04 * 9.81 / 56.0).epsilon(1e-12));
  CHECK(cal.r_mm_per_px == doctest::Approx(3.504).epsilon(1e-3));
}

TEST_CASE("fit_ptm_scale recovers a known scale from exact ballistic pixels") {
  // Free fall sampled at 30 fps with the apex exactly on a frame, projected
  // at 3.5 mm/px.
  const double scale = 3.5, g = 9.81, fps = 30.0;
  std::vector<double> x;
  for (int i = 0; i < 10; ++i) x.push_back(500.0 * static_cast<double>(i) / scale * 0.04);
  const double apex_mm = 500.0 * 0.36;
  x.push_back(apex_mm / scale);
  const std::size_t apex_index = x.size() - 1;
  for (int k = 1; k <= 12; ++k) {
    const double t = static_cast<double>(k) / fps;
    x.push_back((apex_mm - 500.0 * g * t * t) / scale);
  }
  const ScaleCalibration cal = fit_ptm_scale(px(x, fps), apex_index, Constants{});
  CHECK(cal.r_mm_per_px == doctest::Approx(scale).epsilon(0.02));
}

TEST_CASE("fit_ptm_scale stays within the snapped-time quantization envelope") {
  // Exact ballistic pixels with the apex deliberately placed *between*
  // samples: the recovered scale error is bounded by 2 * (frame period) / T.
  const double scale = 3.5, g = 9.81, fps = 30.0;
  for (double phase : {0.0, 0.1, 0.25, 0.4, 0.49}) {
    std::vector<double> x;
    const double apex_mm = 500.0 * 0.36;
    const double t_apex = (10.0 + phase) / fps;
    for (int i = 0; i <= 24; ++i) {
      const double dt = static_cast<double>(i) / fps - t_apex;
      x.push_back((apex_mm - 500.0 * g * dt * dt) / scale);
    }
    const std::size_t apex_index = argmax(x);
    const ScaleCalibration cal = fit_ptm_scale(px(x, fps), apex_index, Constants{});
    const double bound = 2.0 * (1.0 / fps) / cal.free_fall_duration_s;
    CHECK(std::fabs(cal.r_mm_per_px - scale) / scale <= bound);
  }
}

TEST_CASE("fit_ptm_scale error paths") {
  Constants c;
  // apex not the maximum
  CHECK_THROWS_AS(fit_ptm_scale(px({0.0, 10.0, 5.0, 2.0, 1.0, 0.5}), 2, c), Error);
  // drop never reaches the fall fraction
  std::vector<double> shallow{0.0, 100.0, 99.0, 98.0, 97.0};
  bool calibration_error = false;
  try {
    fit_ptm_scale(px(shallow), 1, c);
  } catch (const Error& e) {
    calibration_error = e.code() == errc::calibration;
  }
  CHECK(calibration_error);
  // nothing after the apex
  CHECK_THROWS_AS(fit_ptm_scale(px({0.0, 50.0, 100.0}), 2, c), Error);
  // flat segment
  CHECK_THROWS_AS(fit_ptm_scale(px({5.0, 5.0, 5.0}), 0, c), Error);
}

TEST_CASE("apply_ptm scales values and preserves sign") {
  ScaleCalibration cal;
  cal.r_mm_per_px = 3.5;
  const TimeSeries out = apply_ptm(px({0.0, 10.0}), cal);
  CHECK(out.samples[0] == 0.0);
  CHECK(out.samples[1] == doctest::Approx(35.0));
  CHECK(out.unit == Unit::Millimetres);

  cal.r_mm_per_px = 2.0;
  const TimeSeries neg = apply_ptm(px({-4.0}), cal);
  CHECK(neg.samples[0] == doctest::Approx(-8.0));

  cal.r_mm_per_px = 1.0;
  const TimeSeries id = apply_ptm(px({1.25, -2.5}), cal);
  CHECK(id.samples[0] == 1.25);
  CHECK(id.samples[1] == -2.5);
  CHECK(id.unit == Unit::Millimetres);
}

TEST_CASE("apply_ptm is additive in its input") {
  ScaleCalibration cal;
  cal.r_mm_per_px = 2.75;
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::vector<double> a(30), b(30), sum(30);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
    sum[i] = a[i] + b[i];
  }
  const TimeSeries fa = apply_ptm(px(a), cal);
  const TimeSeries fb = apply_ptm(px(b), cal);
  const TimeSeries fsum = apply_ptm(px(sum), cal);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(fsum.samples[i] == doctest::Approx(fa.samples[i] + fb.samples[i]).epsilon(1e-12));
}

TEST_CASE("apply_ptm rejects non-pixel input") {
  ScaleCalibration cal;
  cal.r_mm_per_px = 2.0;
  CHECK_THROWS_AS(apply_ptm(mm({1.0}), cal), Error);
}

TEST_CASE("heights after reverse_minmax ignore any positive rescaling of the input") {
  // The pixel scale cancels entirely: only the reference range matters.
  std::vector<double> q{0.0, 0.0, 8.0, 30.0, 55.0, 30.0, 8.0, 0.0, 0.0, 0.0};
  std::vector<double> p{30.0, 30.0, 60.0, 140.0, 230.0, 140.0, 60.0, 30.0, 30.0, 30.0};
  const auto height_of = [&](double gain) {
    std::vector<double> scaled(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) scaled[i] = gain * q[i];
    JumpSegment seg;
    seg.displacement = reverse_minmax(px(std::move(scaled)), mm(p));
    seg.apex_index = argmax(seg.displacement.samples);
    return (seg.displacement.samples[seg.apex_index] -
            median(std::span<const double>(seg.displacement.samples.data(), 1))) /
           10.0;
  };
  const double base = height_of(1.0);
  for (double gain : {0.25, 3.0, 117.0})
    CHECK(height_of(gain) == doctest::Approx(base).epsilon(1e-9));
}
