// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "jumpmetrics/metrics.hpp"

using namespace jm;

namespace {

JumpSegment segment_mm(std::vector<double> v) {
  JumpSegment seg;
  seg.displacement = {std::move(v), 100.0, Unit::Millimetres};
  seg.apex_index = argmax(seg.displacement.samples);
  return seg;
}

}  // namespace

TEST_CASE("jump height is apex over the stance baseline, in centimetres") {
  // Stance at 40 mm (first tenth of the segment), apex exactly 240 mm.
  std::vector<double> v(100, 40.0);
  for (int i = 0; i <= 30; ++i)
    v[static_cast<std::size_t>(40 + i)] = 40.0 + 200.0 * std::sin(3.14159265358979 * i / 30.0);
  const double h = jump_height_from_displacement(segment_mm(std::move(v)));
  CHECK(h == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("a flat segment has no physical jump") {
  bool non_physical = false;
  try {
    jump_height_from_displacement(segment_mm(std::vector<double>(50, 40.0)));
  } catch (const Error& e) {
    non_physical = e.code() == errc::non_physical;
  }
  CHECK(non_physical);
}

TEST_CASE("jump height scales linearly with the segment") {
  std::vector<double> v(60, 10.0);
  for (int i = 0; i < 20; ++i)
    v[static_cast<std::size_t>(25 + i)] = 10.0 + 150.0 * std::sin(3.14159265358979 * i / 19.0);
  const double h1 = jump_height_from_displacement(segment_mm(v));
  for (double c : {2.0, 0.5, 13.0}) {
    std::vector<double> scaled(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) scaled[i] = c * v[i];
    const double hc = jump_height_from_displacement(segment_mm(std::move(scaled)));
    CHECK(hc == doctest::Approx(c * h1).epsilon(1e-12));
  }
}

TEST_CASE("jump height rejects non-millimetre segments") {
  JumpSegment seg;
  seg.displacement = {{0.0, 10.0, 0.0}, 30.0, Unit::Pixels};
  seg.apex_index = 1;
  CHECK_THROWS_AS(jump_height_from_displacement(seg), Error);
}
