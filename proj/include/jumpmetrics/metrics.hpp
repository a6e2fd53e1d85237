// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <string>

#include "jumpmetrics/core.hpp"

namespace jm {

enum class Method { FP, OMC, RMM, PTM };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::FP: return "fp";
    case Method::OMC: return "omc";
    case Method::RMM: return "rmm";
    case Method::PTM: return "ptm";
  }
  return "?";
}

struct JumpMeasurement {
  RepetitionId rep;
  Method method = Method::FP;
  double height_cm = 0.0;
};

/// Jump height from a millimetre displacement segment: apex above the
/// pre-jump stance level, where stance is the median of the first tenth of
/// the segment.
inline double jump_height_from_displacement(const JumpSegment& segment) {
  segment.validate();
  require_unit(segment.displacement, Unit::Millimetres, "jump_height_from_displacement");
  const std::vector<double>& x = segment.displacement.samples;
  const std::size_t head = std::max<std::size_t>(1, x.size() / 10);
  const double baseline = median(std::span<const double>(x.data(), head));
  const double apex = x[segment.apex_index];
  if (!(apex > baseline))
    fail(errc::non_physical, "jump_height_from_displacement: apex does not rise above stance");
  return (apex - baseline) / 10.0;  // mm -> cm
}

}  // namespace jm
