// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "jumpmetrics/core.hpp"
#include "jumpmetrics/denoise.hpp"

namespace jm {

struct SegmentConfig {
  double half_window_s = 1.0;
  double min_peak_prominence_frac = 0.5;  // fraction of global amplitude
  double min_peak_separation_s = 1.0;
  std::optional<int> expected_reps = 3;

  void validate() const {
    if (!(half_window_s > 0.0)) fail(errc::argument, "half_window_s must be positive");
    if (!(min_peak_prominence_frac > 0.0) || min_peak_prominence_frac > 1.0)
      fail(errc::argument, "min_peak_prominence_frac must be in (0, 1]");
    if (!(min_peak_separation_s > 0.0))
      fail(errc::argument, "min_peak_separation_s must be positive");
    if (expected_reps && *expected_reps < 1) fail(errc::argument, "expected_reps must be >= 1");
  }
};

struct Peak {
  std::size_t index = 0;
  double prominence = 0.0;
};

/// Local maxima (plateau midpoints) whose topographic prominence reaches
/// min_peak_prominence_frac of the global amplitude, thinned so that kept
/// peaks are at least min_peak_separation_s apart (highest first).
inline std::vector<Peak> find_prominent_peaks(const TimeSeries& series, const SegmentConfig& cfg) {
  cfg.validate();
  require_nonempty(series, "find_prominent_peaks");
  require_rate(series, "find_prominent_peaks");
  const std::vector<double>& x = series.samples;
  const std::size_t n = x.size();
  if (n < 3) return {};

  std::vector<std::size_t> maxima;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (x[i] <= x[i - 1]) continue;
    std::size_t j = i;
    while (j + 1 < n && x[j + 1] == x[i]) ++j;
    if (j + 1 < n && x[j + 1] < x[i]) maxima.push_back((i + j) / 2);
    i = j;
  }

  const double amplitude = max_value(x) - min_value(x);
  if (amplitude <= 0.0) return {};
  const double min_prom = cfg.min_peak_prominence_frac * amplitude;

  std::vector<Peak> peaks;
  for (std::size_t p : maxima) {
    double left_min = x[p];
    for (std::size_t i = p; i-- > 0;) {
      if (x[i] > x[p]) break;
      left_min = std::min(left_min, x[i]);
    }
    double right_min = x[p];
    for (std::size_t i = p + 1; i < n; ++i) {
      if (x[i] > x[p]) break;
      right_min = std::min(right_min, x[i]);
    }
    const double prom = x[p] - std::max(left_min, right_min);
    if (prom >= min_prom) peaks.push_back({p, prom});
  }

  // Enforce minimum separation, keeping taller peaks first.
  std::vector<std::size_t> order(peaks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[peaks[a].index] != x[peaks[b].index]) return x[peaks[a].index] > x[peaks[b].index];
    return peaks[a].index < peaks[b].index;
  });
  const double min_sep = cfg.min_peak_separation_s * series.rate_hz;
  std::vector<Peak> kept;
  for (std::size_t oi : order) {
    const double idx = static_cast<double>(peaks[oi].index);
    bool ok = true;
    for (const Peak& k : kept) {
      if (std::fabs(idx - static_cast<double>(k.index)) < min_sep) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(peaks[oi]);
  }
  std::sort(kept.begin(), kept.end(), [](const Peak& a, const Peak& b) { return a.index < b.index; });
  return kept;
}

struct SegmentationResult {
  std::vector<JumpSegment> segments;
  bool count_matches_expected = true;
};

/// Cut one window per detected peak. Windows span half_window_s to either
/// side, clipped to the series and additionally trimmed so no sample in a
/// window exceeds its own apex (keeps the apex invariant when neighbouring
/// repetitions differ a lot in height).
inline SegmentationResult segment_repetitions(const TimeSeries& series, const SegmentConfig& cfg,
                                              Source source = Source::MMC,
                                              const std::string& participant = {},
                                              Task task = Task::Bilateral) {
  const std::vector<Peak> peaks = find_prominent_peaks(series, cfg);
  if (peaks.empty()) fail(errc::segmentation, "no peaks satisfy the prominence requirement");

  const std::vector<double>& x = series.samples;
  const std::size_t n = x.size();
  const auto window = static_cast<std::size_t>(cfg.half_window_s * series.rate_hz);

  SegmentationResult result;
  int rep = 1;
  for (const Peak& p : peaks) {
    std::size_t lo = p.index > window ? p.index - window : 0;
    std::size_t hi = std::min(n, p.index + window + 1);
    for (std::size_t i = p.index; i-- > lo;) {
      if (x[i] > x[p.index]) {
        lo = i + 1;
        break;
      }
    }
    for (std::size_t i = p.index + 1; i < hi; ++i) {
      if (x[i] > x[p.index]) {
        hi = i;
        break;
      }
    }
    JumpSegment seg;
    seg.displacement.samples.assign(x.begin() + static_cast<std::ptrdiff_t>(lo),
                                    x.begin() + static_cast<std::ptrdiff_t>(hi));
    seg.displacement.rate_hz = series.rate_hz;
    seg.displacement.unit = series.unit;
    seg.apex_index = p.index - lo;
    seg.start_index = lo;
    seg.source = source;
    seg.rep = RepetitionId{participant, task, rep++};
    seg.validate();
    result.segments.push_back(std::move(seg));
  }
  if (cfg.expected_reps)
    result.count_matches_expected =
        static_cast<int>(result.segments.size()) == *cfg.expected_reps;
  return result;
}

enum class FailureReason { None, LowConfidence, ImplausibleSpeed, NoPeak };

inline const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::None: return "none";
    case FailureReason::LowConfidence: return "low_confidence";
    case FailureReason::ImplausibleSpeed: return "implausible_speed";
    case FailureReason::NoPeak: return "no_peak";
  }
  return "?";
}

struct FailureVerdict {
  bool valid = true;
  FailureReason reason = FailureReason::None;
  std::string detail;
};

struct FailureConfig {
  double min_confidence = 0.3;
  double max_low_conf_frac = 0.2;
  double max_speed_px_per_frame = 0.0;  // callers usually set 0.25 x image height
};

/// Screen a keypoint track for pose-estimation failure: too many
/// low-confidence frames, implausible frame-to-frame motion after despiking,
/// or no jump-like peak at all.
inline FailureVerdict detect_failure(const TimeSeries& vertical_px, const TimeSeries& confidence,
                                     const FailureConfig& cfg, const DenoiseConfig& denoise = {},
                                     const SegmentConfig& segment = {}) {
  require_nonempty(vertical_px, "detect_failure");
  if (vertical_px.size() != confidence.size())
    fail(errc::alignment, "detect_failure: vertical and confidence series differ in length");
  if (!(cfg.max_speed_px_per_frame > 0.0))
    fail(errc::argument, "detect_failure: max_speed_px_per_frame must be positive");

  const std::size_t n = vertical_px.size();
  std::size_t low = 0;
  for (double c : confidence.samples)
    if (c < cfg.min_confidence) ++low;
  const double low_frac = static_cast<double>(low) / static_cast<double>(n);
  if (low_frac > cfg.max_low_conf_frac)
    return {false, FailureReason::LowConfidence,
            std::to_string(100.0 * low_frac) + "% of frames below confidence " +
                std::to_string(cfg.min_confidence)};

  const TimeSeries despiked = zscore_despike(vertical_px, denoise);
  for (std::size_t i = 1; i < n; ++i) {
    const double step = std::fabs(despiked.samples[i] - despiked.samples[i - 1]);
    if (step > cfg.max_speed_px_per_frame)
      return {false, FailureReason::ImplausibleSpeed,
              "frame " + std::to_string(i) + " moves " + std::to_string(step) + " px"};
  }

  if (find_prominent_peaks(despiked, segment).empty())
    return {false, FailureReason::NoPeak, "no peak satisfies the prominence requirement"};

  return {true, FailureReason::None, {}};
}

}  // namespace jm
