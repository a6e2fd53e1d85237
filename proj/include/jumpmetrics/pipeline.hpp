// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jumpmetrics/agreement.hpp"
#include "jumpmetrics/core.hpp"
#include "jumpmetrics/denoise.hpp"
#include "jumpmetrics/forceplate.hpp"
#include "jumpmetrics/io.hpp"
#include "jumpmetrics/metrics.hpp"
#include "jumpmetrics/rescale.hpp"
#include "jumpmetrics/resample.hpp"
#include "jumpmetrics/segment.hpp"

namespace jm {

enum class ScaleMode { PerRep, SessionMean };

struct PipelineConfig {
  DenoiseConfig denoise;
  SegmentConfig segment;
  FlightDetectionConfig flight;
  Constants constants;
  double min_confidence = 0.3;
  double max_low_conf_frac = 0.2;
  double max_speed_frac_image_height = 0.25;
  double fall_fraction = 0.4;
  // Every displacement stream is Fourier-resampled to one analysis rate
  // before smoothing, so the sample-count smoothing window has the same time
  // support on every modality. 0 = auto: the smallest integer multiple of
  // the camera rate that reaches 100 Hz, which keeps camera frame instants
  // (the jump apex among them) on the analysis grid.
  double analysis_rate_hz = 0.0;
  ScaleMode scale_mode = ScaleMode::PerRep;
  bool pool_participant_means = false;

  void validate() const {
    denoise.validate();
    segment.validate();
    if (!(constants.g > 0.0)) fail(errc::argument, "g must be positive");
    if (!(fall_fraction > 0.0) || fall_fraction > 1.0)
      fail(errc::argument, "fall_fraction must be in (0, 1]");
    if (analysis_rate_hz < 0.0) fail(errc::argument, "analysis_rate_hz must be >= 0");
  }
};

/// Read a pipeline config from a key/value file; unknown keys are rejected.
inline PipelineConfig parse_config(const std::filesystem::path& path) {
  PipelineConfig cfg;
  for (const auto& [key, value] : parse_keyvalue_file(path)) {
    const std::string where = path.string() + " " + key;
    const auto num = [&] { return detail::parse_double(value, where); };
    if (key == "zscore_window") cfg.denoise.zscore_window = static_cast<int>(num());
    else if (key == "zscore_threshold") cfg.denoise.zscore_threshold = num();
    else if (key == "savgol_window") cfg.denoise.savgol_window = static_cast<int>(num());
    else if (key == "savgol_order") cfg.denoise.savgol_order = static_cast<int>(num());
    else if (key == "half_window_s") cfg.segment.half_window_s = num();
    else if (key == "min_peak_prominence_frac") cfg.segment.min_peak_prominence_frac = num();
    else if (key == "min_peak_separation_s") cfg.segment.min_peak_separation_s = num();
    else if (key == "expected_reps") {
      const int reps = static_cast<int>(num());
      cfg.segment.expected_reps = reps > 0 ? std::optional<int>(reps) : std::nullopt;
    } else if (key == "min_confidence") cfg.min_confidence = num();
    else if (key == "max_low_conf_frac") cfg.max_low_conf_frac = num();
    else if (key == "max_speed_frac_image_height") cfg.max_speed_frac_image_height = num();
    else if (key == "fall_fraction") cfg.fall_fraction = num();
    else if (key == "g") cfg.constants.g = num();
    else if (key == "analysis_rate_hz") cfg.analysis_rate_hz = num();
    else if (key == "stance_load_frac") cfg.flight.stance_load_frac = num();
    else if (key == "flight_threshold_frac") cfg.flight.flight_threshold_frac = num();
    else if (key == "noise_band_sds") cfg.flight.noise_band_sds = num();
    else if (key == "min_flight_s") cfg.flight.min_flight_s = num();
    else if (key == "max_flight_s") cfg.flight.max_flight_s = num();
    else if (key == "scale_mode") {
      if (value == "per_rep") cfg.scale_mode = ScaleMode::PerRep;
      else if (value == "session_mean") cfg.scale_mode = ScaleMode::SessionMean;
      else fail(errc::validation, where + ": expected per_rep or session_mean");
    } else if (key == "pool_participant_means") cfg.pool_participant_means = num() != 0.0;
    else fail(errc::validation, path.string() + ": unknown config key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

struct Exclusion {
  RepetitionId rep;      // rep == 0 means the whole modality for this session
  std::string modality;  // "mmc", "omc", "fp"
  std::string reason;
};

struct SessionResult {
  std::string participant;
  Task task = Task::Bilateral;
  std::vector<JumpMeasurement> measurements;
  std::vector<Exclusion> exclusions;
  std::vector<std::string> flags;  // non-fatal anomalies, e.g. unexpected repetition counts
  std::vector<ScaleCalibration> calibrations;
  std::optional<double> mean_r_mm_per_px;
  std::map<std::string, std::size_t> detected;  // segments/windows found per modality
};

namespace detail {

/// Analysis rate actually used for a session with the given camera rate.
inline double resolve_analysis_rate(const PipelineConfig& cfg, double fps) {
  if (cfg.analysis_rate_hz > 0.0) return cfg.analysis_rate_hz;
  if (!(fps > 0.0)) return 100.0;
  return fps * std::max(1.0, std::ceil(100.0 / fps));
}

/// Upsample to the analysis rate (band-limited), leaving the series alone if
/// the rates already match or resampling is disabled.
inline TimeSeries to_analysis_rate(const TimeSeries& s, double analysis_rate_hz) {
  if (analysis_rate_hz <= 0.0 || s.rate_hz <= 0.0) return s;
  if (std::fabs(s.rate_hz - analysis_rate_hz) < 1e-9 * analysis_rate_hz) return s;
  const auto target = static_cast<std::size_t>(
      std::llround(static_cast<double>(s.size()) * analysis_rate_hz / s.rate_hz));
  if (target < 2) return s;
  return fft_resample(s, target);
}

/// Match detected items (by their event time) to the canonical repetition
/// slots; greedy nearest-slot assignment within the tolerance.
inline std::vector<int> match_to_slots(const std::vector<double>& item_times,
                                       const std::vector<double>& slot_times, double tol_s) {
  std::vector<int> assignment(item_times.size(), -1);
  std::vector<char> taken(slot_times.size(), 0);
  for (std::size_t i = 0; i < item_times.size(); ++i) {
    int best = -1;
    double best_dt = tol_s;
    for (std::size_t s = 0; s < slot_times.size(); ++s) {
      if (taken[s]) continue;
      const double dt = std::fabs(item_times[i] - slot_times[s]);
      if (dt <= best_dt) {
        best_dt = dt;
        best = static_cast<int>(s);
      }
    }
    if (best >= 0) {
      assignment[i] = best;
      taken[static_cast<std::size_t>(best)] = 1;
    }
  }
  return assignment;
}

inline double segment_apex_time(const JumpSegment& seg) {
  return static_cast<double>(seg.start_index + seg.apex_index) / seg.displacement.rate_hz;
}

/// Slice a window out of a parallel series and set the apex to the window's
/// own maximum.
inline JumpSegment slice_segment(const TimeSeries& series, const JumpSegment& like, Source source) {
  JumpSegment out;
  const std::size_t lo = like.start_index;
  const std::size_t hi = std::min(series.size(), lo + like.displacement.size());
  if (lo >= hi) fail(errc::alignment, "segment window outside parallel series");
  out.displacement.samples.assign(series.samples.begin() + static_cast<std::ptrdiff_t>(lo),
                                  series.samples.begin() + static_cast<std::ptrdiff_t>(hi));
  out.displacement.rate_hz = series.rate_hz;
  out.displacement.unit = series.unit;
  out.apex_index = argmax(out.displacement.samples);
  out.start_index = lo;
  out.source = source;
  out.rep = like.rep;
  return out;
}

/// Pixel-to-metric calibration with a ballistic-consistent readout.
///
/// A first pass on the smoothed segment locates the fall sample. The
/// calibration then reads a conditioned copy of the segment: the raw series
/// trimmed just past the fall sample (so no smoothing window reaches the
/// landing), re-smoothed, and with the apex-centred stretch replaced by a
/// least-squares parabola fit of the airborne samples. The parabola pins the
/// apex sample against noise on the flat top of the flight arc, which
/// otherwise leaks into the scale quadratically through the snapped fall
/// time.
inline ScaleCalibration fit_ptm_conditioned(const TimeSeries& hip_smoothed,
                                            const TimeSeries& hip_raw, std::size_t apex_index,
                                            const PipelineConfig& cfg, const RepetitionId& rep) {
  const ScaleCalibration first =
      fit_ptm_scale(hip_smoothed, apex_index, cfg.constants, cfg.fall_fraction, rep);
  const auto k = static_cast<std::size_t>(
      std::llround(first.free_fall_duration_s * hip_smoothed.rate_hz));
  const std::size_t end = std::min(hip_raw.size(), apex_index + k + 4);
  if (end < static_cast<std::size_t>(cfg.denoise.savgol_window) || end <= apex_index + 1 || k < 3)
    return first;
  TimeSeries trimmed = hip_raw;
  trimmed.samples.resize(end);
  TimeSeries conditioned = savgol_smooth(trimmed, cfg.denoise);

  // Quadratic fit over the apex-centred airborne window of the raw samples.
  const std::size_t w_lo = apex_index > k ? apex_index - k : 0;
  const std::size_t w_hi = std::min(end, apex_index + k + 1);
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, m0 = 0, m1 = 0, m2 = 0;
  for (std::size_t i = w_lo; i < w_hi; ++i) {
    const double t = static_cast<double>(i) - static_cast<double>(apex_index);
    const double y = trimmed.samples[i];
    s0 += 1.0;
    s1 += t;
    s2 += t * t;
    s3 += t * t * t;
    s4 += t * t * t * t;
    m0 += y;
    m1 += y * t;
    m2 += y * t * t;
  }
  const std::vector<double> beta =
      solve_dense({{s0, s1, s2}, {s1, s2, s3}, {s2, s3, s4}}, {m0, m1, m2});
  const double curvature = beta[2];
  if (curvature < 0.0) {
    const double vertex = -beta[1] / (2.0 * curvature);
    if (std::fabs(vertex) <= static_cast<double>(k)) {
      for (std::size_t i = w_lo; i < w_hi; ++i) {
        const double t = static_cast<double>(i) - static_cast<double>(apex_index);
        conditioned.samples[i] = beta[0] + beta[1] * t + curvature * t * t;
      }
    }
  }

  const std::size_t apex_cond = argmax(conditioned.samples);
  try {
    return fit_ptm_scale(conditioned, apex_cond, cfg.constants, cfg.fall_fraction, rep);
  } catch (const Error&) {
    return first;  // conditioned read ran out of samples; keep the first pass
  }
}

}  // namespace detail

/// Per-modality intermediate state for one session.
struct PreprocessedTrack {
  TimeSeries hip;         // smoothed, analysis rate
  TimeSeries toe;         // smoothed, analysis rate
  TimeSeries hip_raw;     // despiked only, analysis rate (pre-smoothing)
  std::vector<JumpSegment> hip_segments;
};

/// Run the full pipeline for one session manifest. Stage errors become
/// exclusions in the result, not process aborts.
inline SessionResult run_session(const SessionManifest& manifest, const PipelineConfig& cfg) {
  cfg.validate();
  SessionResult result;
  result.participant = manifest.participant;
  result.task = manifest.task;

  const auto exclude = [&](const std::string& modality, int rep, const std::string& reason) {
    result.exclusions.push_back({{manifest.participant, manifest.task, rep}, modality, reason});
  };

  const auto rate_matches = [](const std::optional<double>& declared, double actual) {
    return !declared || std::fabs(actual - *declared) <= 1e-6 * *declared;
  };
  double analysis_rate = cfg.analysis_rate_hz;  // resolved against the camera rate below

  // --- MMC ---
  std::optional<PreprocessedTrack> mmc;
  try {
    const KeypointRecording kp = parse_keypoints(manifest.keypoints_path);
    if (!rate_matches(manifest.fps, kp.fps))
      fail(errc::validation, "keypoints fps disagrees with manifest");
    analysis_rate = detail::resolve_analysis_rate(cfg, kp.fps);
    const KeypointTrack hip = extract_vertical(kp, manifest.hip_joint);
    const KeypointTrack toe = extract_vertical(kp, manifest.toe_joint);

    FailureConfig fc;
    fc.min_confidence = cfg.min_confidence;
    fc.max_low_conf_frac = cfg.max_low_conf_frac;
    fc.max_speed_px_per_frame = cfg.max_speed_frac_image_height * kp.image_height_px;
    for (const auto& [name, track] : {std::pair{"hip", &hip}, std::pair{"toe", &toe}}) {
      const FailureVerdict verdict =
          detect_failure(track->position, track->confidence, fc, cfg.denoise, cfg.segment);
      if (!verdict.valid)
        fail(errc::validation, std::string("failure case (") + name + " " +
                                   to_string(verdict.reason) + "): " + verdict.detail);
    }

    PreprocessedTrack t;
    t.hip_raw = detail::to_analysis_rate(zscore_despike(hip.position, cfg.denoise),
                                         analysis_rate);
    t.hip = savgol_smooth(t.hip_raw, cfg.denoise);
    t.toe = savgol_smooth(
        detail::to_analysis_rate(zscore_despike(toe.position, cfg.denoise), analysis_rate),
        cfg.denoise);
    const SegmentationResult segs =
        segment_repetitions(t.hip, cfg.segment, Source::MMC, manifest.participant, manifest.task);
    if (!segs.count_matches_expected)
      result.flags.push_back("mmc: detected " + std::to_string(segs.segments.size()) +
                             " repetitions, expected " +
                             std::to_string(*cfg.segment.expected_reps));
    t.hip_segments = segs.segments;
    result.detected["mmc"] = t.hip_segments.size();
    mmc = std::move(t);
  } catch (const Error& e) {
    exclude("mmc", 0, e.what());
  }

  // --- OMC ---
  std::optional<PreprocessedTrack> omc;
  if (manifest.markers_path) {
    try {
      const MarkerRecording mk = parse_markers(*manifest.markers_path);
      if (!rate_matches(manifest.omc_hz, mk.rate_hz))
        fail(errc::validation, "markers rate disagrees with manifest");
      if (analysis_rate <= 0.0) analysis_rate = detail::resolve_analysis_rate(cfg, mk.rate_hz);
      PreprocessedTrack t;
      t.hip_raw = detail::to_analysis_rate(
          zscore_despike(extract_vertical(mk, manifest.hip_marker), cfg.denoise),
          analysis_rate);
      t.hip = savgol_smooth(t.hip_raw, cfg.denoise);
      t.toe = savgol_smooth(
          detail::to_analysis_rate(zscore_despike(extract_vertical(mk, manifest.toe_marker), cfg.denoise),
                                   analysis_rate),
          cfg.denoise);
      const SegmentationResult segs =
          segment_repetitions(t.hip, cfg.segment, Source::OMC, manifest.participant, manifest.task);
      if (!segs.count_matches_expected)
        result.flags.push_back("omc: detected " + std::to_string(segs.segments.size()) +
                               " repetitions, expected " +
                               std::to_string(*cfg.segment.expected_reps));
      t.hip_segments = segs.segments;
      result.detected["omc"] = t.hip_segments.size();
      omc = std::move(t);
    } catch (const Error& e) {
      exclude("omc", 0, e.what());
    }
  }

  // --- FP ---
  std::vector<FlightWindow> fp_windows;
  double fp_rate = 0.0;
  if (manifest.force_path) {
    try {
      const ForceTrace trace = parse_force(*manifest.force_path);
      if (!rate_matches(manifest.fp_hz, trace.force.rate_hz))
        fail(errc::validation, "force rate disagrees with manifest");
      fp_windows = detect_flight_windows(trace, cfg.flight);
      fp_rate = trace.force.rate_hz;
      result.detected["fp"] = fp_windows.size();
      if (cfg.segment.expected_reps &&
          static_cast<int>(fp_windows.size()) != *cfg.segment.expected_reps)
        result.flags.push_back("fp: detected " + std::to_string(fp_windows.size()) +
                               " flight windows, expected " +
                               std::to_string(*cfg.segment.expected_reps));
    } catch (const Error& e) {
      exclude("fp", 0, e.what());
    }
  }

  // --- canonical repetition slots, ordered in time ---
  std::vector<double> slot_times;
  if (!fp_windows.empty())
    for (const FlightWindow& w : fp_windows)
      slot_times.push_back(0.5 * static_cast<double>(w.toe_off_index + w.landing_index) / fp_rate);
  else if (omc)
    for (const JumpSegment& s : omc->hip_segments) slot_times.push_back(detail::segment_apex_time(s));
  else if (mmc)
    for (const JumpSegment& s : mmc->hip_segments) slot_times.push_back(detail::segment_apex_time(s));
  const double tol_s = 0.75 * cfg.segment.min_peak_separation_s;

  const auto assign = [&](const std::vector<double>& times, const char* modality) {
    std::vector<int> slots = detail::match_to_slots(times, slot_times, tol_s);
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (slots[i] < 0)
        exclude(modality, static_cast<int>(i + 1),
                "repetition does not align with any detected repetition slot");
    return slots;
  };

  // --- FP heights ---
  if (!fp_windows.empty()) {
    for (std::size_t i = 0; i < fp_windows.size(); ++i) {
      const RepetitionId rep{manifest.participant, manifest.task, static_cast<int>(i + 1)};
      try {
        result.measurements.push_back(
            {rep, Method::FP, height_from_flight_time(fp_windows[i].flight_time_s, cfg.constants)});
      } catch (const Error& e) {
        exclude("fp", rep.rep, e.what());
      }
    }
  }

  // --- OMC heights ---
  std::vector<int> omc_slots;
  if (omc) {
    std::vector<double> times;
    for (const JumpSegment& s : omc->hip_segments) times.push_back(detail::segment_apex_time(s));
    omc_slots = assign(times, "omc");
    for (std::size_t i = 0; i < omc->hip_segments.size(); ++i) {
      if (omc_slots[i] < 0) continue;
      const RepetitionId rep{manifest.participant, manifest.task, omc_slots[i] + 1};
      try {
        JumpSegment toe_seg = detail::slice_segment(omc->toe, omc->hip_segments[i], Source::OMC);
        toe_seg.rep = rep;
        result.measurements.push_back({rep, Method::OMC, jump_height_from_displacement(toe_seg)});
      } catch (const Error& e) {
        exclude("omc", rep.rep, e.what());
      }
    }
  }

  // --- MMC heights (RMM needs OMC; PTM needs a gravity calibration) ---
  if (mmc) {
    std::vector<double> times;
    for (const JumpSegment& s : mmc->hip_segments) times.push_back(detail::segment_apex_time(s));
    const std::vector<int> mmc_slots = assign(times, "mmc");

    // Calibrations first, so a session mean is available as fallback.
    std::vector<std::optional<ScaleCalibration>> cals(mmc->hip_segments.size());
    for (std::size_t i = 0; i < mmc->hip_segments.size(); ++i) {
      if (mmc_slots[i] < 0) continue;
      const JumpSegment& hip_seg = mmc->hip_segments[i];
      const RepetitionId rep{manifest.participant, manifest.task, mmc_slots[i] + 1};
      try {
        TimeSeries raw;
        raw.samples.assign(
            mmc->hip_raw.samples.begin() + static_cast<std::ptrdiff_t>(hip_seg.start_index),
            mmc->hip_raw.samples.begin() +
                static_cast<std::ptrdiff_t>(hip_seg.start_index + hip_seg.displacement.size()));
        raw.rate_hz = mmc->hip_raw.rate_hz;
        raw.unit = mmc->hip_raw.unit;
        cals[i] = detail::fit_ptm_conditioned(hip_seg.displacement, raw, hip_seg.apex_index, cfg, rep);
        result.calibrations.push_back(*cals[i]);
      } catch (const Error& e) {
        exclude("mmc", rep.rep, std::string("calibration: ") + e.what());
      }
    }
    if (!result.calibrations.empty()) {
      double sum = 0.0;
      for (const ScaleCalibration& c : result.calibrations) sum += c.r_mm_per_px;
      result.mean_r_mm_per_px = sum / static_cast<double>(result.calibrations.size());
    }

    for (std::size_t i = 0; i < mmc->hip_segments.size(); ++i) {
      if (mmc_slots[i] < 0) continue;
      const RepetitionId rep{manifest.participant, manifest.task, mmc_slots[i] + 1};
      JumpSegment toe_seg;
      try {
        toe_seg = detail::slice_segment(mmc->toe, mmc->hip_segments[i], Source::MMC);
        toe_seg.rep = rep;
      } catch (const Error& e) {
        exclude("mmc", rep.rep, e.what());
        continue;
      }

      // PTM
      try {
        std::optional<double> r;
        if (cfg.scale_mode == ScaleMode::SessionMean) {
          if (result.mean_r_mm_per_px) r = result.mean_r_mm_per_px;
        } else if (cals[i]) {
          r = cals[i]->r_mm_per_px;
        } else if (result.mean_r_mm_per_px) {
          r = result.mean_r_mm_per_px;  // per-rep calibration failed; use the session mean
        }
        if (!r) fail(errc::calibration, "no usable pixel-to-metric scale for this session");
        ScaleCalibration cal;
        cal.r_mm_per_px = *r;
        cal.free_fall_duration_s = cals[i] ? cals[i]->free_fall_duration_s : 0.0;
        cal.source_segment = rep;
        JumpSegment ptm_seg = toe_seg;
        ptm_seg.displacement = apply_ptm(toe_seg.displacement, cal);
        result.measurements.push_back({rep, Method::PTM, jump_height_from_displacement(ptm_seg)});
      } catch (const Error& e) {
        exclude("mmc", rep.rep, std::string("ptm: ") + e.what());
      }

      // RMM against the OMC segment in the same slot
      if (omc) {
        const auto omc_it = std::find(omc_slots.begin(), omc_slots.end(), mmc_slots[i]);
        if (omc_it != omc_slots.end()) {
          const std::size_t oi = static_cast<std::size_t>(omc_it - omc_slots.begin());
          try {
            const JumpSegment omc_toe =
                detail::slice_segment(omc->toe, omc->hip_segments[oi], Source::OMC);
            TimeSeries aligned = toe_seg.displacement;
            if (aligned.size() != omc_toe.displacement.size())
              aligned = fft_resample(aligned, omc_toe.displacement.size());
            JumpSegment rmm_seg;
            rmm_seg.displacement = reverse_minmax(aligned, omc_toe.displacement);
            rmm_seg.apex_index = argmax(rmm_seg.displacement.samples);
            rmm_seg.source = Source::MMC;
            rmm_seg.rep = rep;
            result.measurements.push_back({rep, Method::RMM, jump_height_from_displacement(rmm_seg)});
          } catch (const Error& e) {
            exclude("mmc", rep.rep, std::string("rmm: ") + e.what());
          }
        }
      }
    }
  }

  std::sort(result.measurements.begin(), result.measurements.end(),
            [](const JumpMeasurement& a, const JumpMeasurement& b) {
              if (a.rep.rep != b.rep.rep) return a.rep.rep < b.rep.rep;
              return static_cast<int>(a.method) < static_cast<int>(b.method);
            });
  return result;
}

// --- study-level aggregation ---

enum class Scope { Bilateral, Unilateral, Pooled };

inline const char* to_string(Scope s) {
  switch (s) {
    case Scope::Bilateral: return "bilateral";
    case Scope::Unilateral: return "unilateral";
    case Scope::Pooled: return "pooled";
  }
  return "?";
}

struct PairStats {
  Scope scope = Scope::Pooled;
  Method method = Method::RMM;       // candidate method
  Method ground_truth = Method::FP;  // reference method
  bool computable = false;
  AgreementResult icc;
  BlandAltmanResult ba;
};

struct BaPoint {
  Scope scope = Scope::Pooled;
  Method method = Method::RMM;
  Method ground_truth = Method::FP;
  RepetitionId rep;
  double mean_cm = 0.0;
  double diff_cm = 0.0;
};

struct TrrEntry {
  Method method = Method::FP;
  Task task = Task::Bilateral;
  bool computable = false;
  double icc = 0.0;
  std::size_t n_participants = 0;
};

struct Table1Row {
  std::string participant;
  Task task = Task::Bilateral;
  std::optional<double> fp_cm, omc_cm, rmm_cm, ptm_cm;
};

struct StudyReport {
  std::vector<SessionResult> sessions;
  std::vector<Table1Row> table1;
  std::vector<TrrEntry> table2;
  std::vector<PairStats> table3;
  std::vector<BaPoint> ba_points;
};

namespace detail {

inline std::optional<double> find_height(const SessionResult& s, Method m, int rep) {
  for (const JumpMeasurement& jm_ : s.measurements)
    if (jm_.method == m && jm_.rep.rep == rep) return jm_.height_cm;
  return std::nullopt;
}

inline int max_rep(const SessionResult& s) {
  int r = 0;
  for (const JumpMeasurement& m : s.measurements) r = std::max(r, m.rep.rep);
  return r;
}

}  // namespace detail

/// Aggregate per-session results into the study tables: per-participant
/// repetition means, test-retest reliability per method, and per-pair
/// ICC/Bland-Altman agreement for bilateral, unilateral and pooled scopes.
inline StudyReport aggregate_study(std::vector<SessionResult> sessions,
                                   const PipelineConfig& cfg = {}) {
  std::sort(sessions.begin(), sessions.end(), [](const SessionResult& a, const SessionResult& b) {
    if (a.participant != b.participant) return a.participant < b.participant;
    return static_cast<int>(a.task) < static_cast<int>(b.task);
  });
  StudyReport report;
  report.sessions = std::move(sessions);

  constexpr Method kMethods[] = {Method::FP, Method::OMC, Method::RMM, Method::PTM};

  // Table 1: per-session means across repetitions.
  for (const SessionResult& s : report.sessions) {
    Table1Row row;
    row.participant = s.participant;
    row.task = s.task;
    for (Method m : kMethods) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const JumpMeasurement& jm_ : s.measurements)
        if (jm_.method == m) {
          sum += jm_.height_cm;
          ++n;
        }
      std::optional<double> v;
      if (n > 0) v = sum / static_cast<double>(n);
      switch (m) {
        case Method::FP: row.fp_cm = v; break;
        case Method::OMC: row.omc_cm = v; break;
        case Method::RMM: row.rmm_cm = v; break;
        case Method::PTM: row.ptm_cm = v; break;
      }
    }
    report.table1.push_back(std::move(row));
  }

  // Table 2: test-retest reliability per method and task.
  for (Method m : kMethods) {
    for (Task task : {Task::Bilateral, Task::Unilateral}) {
      TrrEntry entry;
      entry.method = m;
      entry.task = task;
      std::vector<std::vector<double>> rows;
      for (const SessionResult& s : report.sessions) {
        if (s.task != task) continue;
        const int reps = detail::max_rep(s);
        if (reps < 2) continue;
        std::vector<double> row;
        bool complete = true;
        for (int r = 1; r <= reps; ++r) {
          const auto h = detail::find_height(s, m, r);
          if (!h) {
            complete = false;
            break;
          }
          row.push_back(*h);
        }
        if (complete && !row.empty()) rows.push_back(std::move(row));
      }
      // All rows must agree on repetition count to form a matrix; keep the
      // most common count so one odd session cannot evict the rest.
      if (!rows.empty()) {
        std::map<std::size_t, std::size_t> counts;
        for (const auto& r : rows) ++counts[r.size()];
        std::size_t k = rows.front().size();
        std::size_t best = 0;
        for (const auto& [size, n] : counts)
          if (n > best) {
            best = n;
            k = size;
          }
        std::erase_if(rows, [&](const std::vector<double>& r) { return r.size() != k; });
      }
      if (rows.size() >= 2) {
        entry.computable = true;
        entry.icc = test_retest_reliability(rows);
        entry.n_participants = rows.size();
      }
      report.table2.push_back(entry);
    }
  }

  // Table 3 + Bland-Altman points: method vs ground truth per scope.
  const std::pair<Method, Method> pairs[] = {{Method::RMM, Method::OMC},
                                             {Method::PTM, Method::OMC},
                                             {Method::RMM, Method::FP},
                                             {Method::PTM, Method::FP}};
  for (Scope scope : {Scope::Bilateral, Scope::Unilateral, Scope::Pooled}) {
    for (const auto& [method, truth] : pairs) {
      PairStats ps;
      ps.scope = scope;
      ps.method = method;
      ps.ground_truth = truth;
      std::vector<double> a, b;
      std::vector<RepetitionId> ids;
      for (const SessionResult& s : report.sessions) {
        if (scope == Scope::Bilateral && s.task != Task::Bilateral) continue;
        if (scope == Scope::Unilateral && s.task != Task::Unilateral) continue;
        if (cfg.pool_participant_means) {
          double sa = 0.0, sb = 0.0;
          std::size_t na = 0, nb = 0;
          for (const JumpMeasurement& jm_ : s.measurements) {
            if (jm_.method == method) {
              sa += jm_.height_cm;
              ++na;
            }
            if (jm_.method == truth) {
              sb += jm_.height_cm;
              ++nb;
            }
          }
          if (na > 0 && nb > 0) {
            a.push_back(sa / static_cast<double>(na));
            b.push_back(sb / static_cast<double>(nb));
            ids.push_back({s.participant, s.task, 0});
          }
        } else {
          for (int r = 1; r <= detail::max_rep(s); ++r) {
            const auto ha = detail::find_height(s, method, r);
            const auto hb = detail::find_height(s, truth, r);
            if (ha && hb) {
              a.push_back(*ha);
              b.push_back(*hb);
              ids.push_back({s.participant, s.task, r});
            }
          }
        }
      }
      if (a.size() >= 2) {
        ps.computable = true;
        std::vector<std::vector<double>> matrix(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) matrix[i] = {a[i], b[i]};
        ps.icc = icc_2_1(matrix, method, truth);
        ps.ba = bland_altman(a, b);
        for (std::size_t i = 0; i < a.size(); ++i)
          report.ba_points.push_back(
              {scope, method, truth, ids[i], 0.5 * (a[i] + b[i]), a[i] - b[i]});
      }
      report.table3.push_back(ps);
    }
  }
  return report;
}

/// Run every manifest (sessions are independent, so they run concurrently),
/// then aggregate in a single-threaded reduction.
inline StudyReport run_study(const std::vector<SessionManifest>& manifests,
                             const PipelineConfig& cfg) {
  if (manifests.empty()) fail(errc::argument, "run_study: need at least one manifest");
  std::vector<std::future<SessionResult>> futures;
  futures.reserve(manifests.size());
  for (const SessionManifest& m : manifests)
    futures.push_back(
        std::async(std::launch::async, [&cfg, m] { return run_session(m, cfg); }));
  std::vector<SessionResult> sessions;
  sessions.reserve(manifests.size());
  for (std::future<SessionResult>& f : futures) sessions.push_back(f.get());
  return aggregate_study(std::move(sessions), cfg);
}

}  // namespace jm
