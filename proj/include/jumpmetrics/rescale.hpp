// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>

#include "jumpmetrics/core.hpp"

namespace jm {

/// Map a series onto [0, 1] by its own range. Constant input has no range to
/// normalize by and is rejected.
inline TimeSeries minmax_normalize(const TimeSeries& series) {
  require_nonempty(series, "minmax_normalize");
  const double lo = min_value(series.samples);
  const double hi = max_value(series.samples);
  if (!(hi > lo)) fail(errc::degenerate_range, "minmax_normalize: constant series");
  TimeSeries out = series;
  out.unit = Unit::Normalized;
  const double inv = 1.0 / (hi - lo);
  for (double& v : out.samples) v = (v - lo) * inv;
  return out;
}

/// Rescale a pixel series into millimetres using a reference series' range:
/// the output spans exactly [min(reference), max(reference)]. Only meaningful
/// for evaluation against a simultaneously captured reference; it cannot run
/// standalone.
inline TimeSeries reverse_minmax(const TimeSeries& mmc_px, const TimeSeries& omc_mm) {
  require_nonempty(omc_mm, "reverse_minmax reference");
  const double lo = min_value(omc_mm.samples);
  const double hi = max_value(omc_mm.samples);
  if (!(hi > lo)) fail(errc::degenerate_range, "reverse_minmax: constant reference series");
  TimeSeries out = minmax_normalize(mmc_px);
  out.unit = Unit::Millimetres;
  const double range = hi - lo;
  for (double& v : out.samples) v = v * range + lo;
  return out;
}

/// Scale factor between image pixels and millimetres, recovered from gravity
/// acting on the body in free fall after the jump apex.
struct ScaleCalibration {
  double r_mm_per_px = 0.0;
  double free_fall_duration_s = 0.0;
  RepetitionId source_segment;
};

/// Fit the pixel-to-metric scale from a hip displacement segment (pixels,
/// up-positive). The free-fall stretch starts at the apex, where vertical
/// velocity is zero; T runs to the first sample whose drop from the apex
/// reaches fall_fraction of the segment amplitude, keeping the read inside
/// the airborne descent. The snapped T and the pixel drop actually observed
/// at that sample enter the scale together.
inline ScaleCalibration fit_ptm_scale(const TimeSeries& hip_px_up, std::size_t apex_index,
                                      const Constants& constants, double fall_fraction = 0.4,
                                      const RepetitionId& source = {}) {
  require_unit(hip_px_up, Unit::Pixels, "fit_ptm_scale");
  require_nonempty(hip_px_up, "fit_ptm_scale");
  require_rate(hip_px_up, "fit_ptm_scale");
  if (!(fall_fraction > 0.0) || fall_fraction > 1.0)
    fail(errc::argument, "fit_ptm_scale: fall_fraction must be in (0, 1]");
  const std::vector<double>& x = hip_px_up.samples;
  const std::size_t n = x.size();
  if (apex_index >= n) fail(errc::argument, "fit_ptm_scale: apex_index out of range");
  const double apex = x[apex_index];
  if (apex < max_value(x)) fail(errc::argument, "fit_ptm_scale: apex is not the segment maximum");
  if (apex_index + 1 >= n)
    fail(errc::calibration, "fit_ptm_scale: no descending samples after apex");

  const double target_drop = fall_fraction * (apex - min_value(x));
  if (!(target_drop > 0.0)) fail(errc::degenerate_range, "fit_ptm_scale: flat segment");

  std::size_t fall_index = 0;
  for (std::size_t i = apex_index + 1; i < n; ++i) {
    if (apex - x[i] >= target_drop) {
      fall_index = i;
      break;
    }
  }
  if (fall_index == 0)
    fail(errc::calibration, "fit_ptm_scale: drop never reaches the fall fraction before segment end");

  const double t = static_cast<double>(fall_index - apex_index) / hip_px_up.rate_hz;
  const double drop_px = std::fabs(apex - x[fall_index]);
  if (!(drop_px > 0.0)) fail(errc::degenerate_range, "fit_ptm_scale: zero pixel drop");

  ScaleCalibration cal;
  cal.r_mm_per_px = 500.0 * t * t * constants.g / drop_px;  // g in m/s^2 yields mm per px
  cal.free_fall_duration_s = t;
  cal.source_segment = source;
  return cal;
}

/// Multiply a pixel series into millimetres by the calibrated scale.
inline TimeSeries apply_ptm(const TimeSeries& series_px, const ScaleCalibration& cal) {
  require_unit(series_px, Unit::Pixels, "apply_ptm");
  if (!(cal.r_mm_per_px > 0.0)) fail(errc::argument, "apply_ptm: non-positive scale");
  TimeSeries out = series_px;
  out.unit = Unit::Millimetres;
  for (double& v : out.samples) v *= cal.r_mm_per_px;
  return out;
}

}  // namespace jm
