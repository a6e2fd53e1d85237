// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace jm {

enum class Unit { Pixels, Millimetres, Centimetres, Newtons, Normalized };

inline const char* to_string(Unit u) {
  switch (u) {
    case Unit::Pixels: return "px";
    case Unit::Millimetres: return "mm";
    case Unit::Centimetres: return "cm";
    case Unit::Newtons: return "N";
    case Unit::Normalized: return "norm";
  }
  return "?";
}

enum class errc {
  unit_mismatch,
  format,
  validation,
  frame_gap,
  lookup,
  length,
  alignment,
  degenerate_range,
  segmentation,
  calibration,
  signal,
  no_flight,
  argument,
  pairing,
  input,
  non_physical,
  io,
};

inline const char* to_string(errc c) {
  switch (c) {
    case errc::unit_mismatch: return "unit_mismatch";
    case errc::format: return "format";
    case errc::validation: return "validation";
    case errc::frame_gap: return "frame_gap";
    case errc::lookup: return "lookup";
    case errc::length: return "length";
    case errc::alignment: return "alignment";
    case errc::degenerate_range: return "degenerate_range";
    case errc::segmentation: return "segmentation";
    case errc::calibration: return "calibration";
    case errc::signal: return "signal";
    case errc::no_flight: return "no_flight";
    case errc::argument: return "argument";
    case errc::pairing: return "pairing";
    case errc::input: return "input";
    case errc::non_physical: return "non_physical";
    case errc::io: return "io";
  }
  return "?";
}

class Error final : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

/// Physical constants used by the flight-time and pixel-to-metric formulas.
struct Constants {
  double g = 9.81;  // m/s^2, downward positive
};

/// Uniformly sampled scalar series. The unit tags what the samples mean;
/// operations verify it instead of trusting call sites.
struct TimeSeries {
  std::vector<double> samples;
  double rate_hz = 0.0;
  Unit unit = Unit::Pixels;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  double duration_s() const noexcept {
    return rate_hz > 0.0 ? static_cast<double>(samples.size()) / rate_hz : 0.0;
  }
};

// --- small numeric helpers shared by the pipeline stages ---

inline std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

inline std::size_t argmin(std::span<const double> v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

inline double max_value(std::span<const double> v) { return *std::max_element(v.begin(), v.end()); }
inline double min_value(std::span<const double> v) { return *std::min_element(v.begin(), v.end()); }

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Sample standard deviation (n-1 denominator); 0 for n < 2.
inline double sample_sd(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

/// Median of a copy of the input (even length: mean of the middle pair).
inline double median(std::span<const double> v) {
  std::vector<double> tmp(v.begin(), v.end());
  const std::size_t mid = tmp.size() / 2;
  std::nth_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(mid), tmp.end());
  double hi = tmp[mid];
  if (tmp.size() % 2 == 1) return hi;
  double lo = *std::max_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline void require_nonempty(const TimeSeries& s, const char* what) {
  if (s.empty()) fail(errc::length, std::string(what) + ": series is empty");
}

inline void require_unit(const TimeSeries& s, Unit expected, const char* what) {
  if (s.unit != expected)
    fail(errc::unit_mismatch, std::string(what) + ": expected " + to_string(expected) +
                                  ", got " + to_string(s.unit));
}

inline void require_rate(const TimeSeries& s, const char* what) {
  if (!(s.rate_hz > 0.0)) fail(errc::validation, std::string(what) + ": rate_hz must be positive");
}

inline void require_finite(const TimeSeries& s, const char* what) {
  if (!all_finite(s.samples))
    fail(errc::validation, std::string(what) + ": series contains non-finite samples");
}

// --- recording types ---

struct Joint {
  double x_px = 0.0;
  double y_px = 0.0;
  double confidence = 0.0;
};

struct KeypointFrame {
  std::vector<Joint> joints;
  long index = 0;
};

/// Per-frame 2D joint positions with confidences, image coordinates
/// (origin top-left, y grows downward until flipped at extraction).
struct KeypointRecording {
  std::vector<KeypointFrame> frames;
  double fps = 0.0;
  std::vector<std::string> joint_names;
  int image_height_px = 0;

  std::size_t joint_count() const noexcept { return joint_names.size(); }

  std::size_t joint_index(const std::string& name) const {
    for (std::size_t i = 0; i < joint_names.size(); ++i)
      if (joint_names[i] == name) return i;
    fail(errc::lookup, "unknown joint name '" + name + "'");
  }

  bool has_joint(const std::string& name) const {
    return std::find(joint_names.begin(), joint_names.end(), name) != joint_names.end();
  }
};

/// One marker's axis series; all three have equal length, unit mm.
struct MarkerSeries {
  TimeSeries x, y, z;
};

struct MarkerRecording {
  std::vector<std::string> marker_order;  // file column order, kept for round-trips
  std::unordered_map<std::string, MarkerSeries> markers;
  double rate_hz = 0.0;
  char vertical_axis = 'z';

  const MarkerSeries& at(const std::string& name) const {
    auto it = markers.find(name);
    if (it == markers.end()) fail(errc::lookup, "unknown marker name '" + name + "'");
    return it->second;
  }

  bool has_marker(const std::string& name) const { return markers.count(name) != 0; }
};

/// Vertical ground-reaction force, newtons, uniformly sampled.
struct ForceTrace {
  TimeSeries force;  // unit Newtons, rate_hz carried inside

  double rate_hz() const noexcept { return force.rate_hz; }
  std::size_t size() const noexcept { return force.size(); }
};

enum class Task { Bilateral, Unilateral };

inline const char* to_string(Task t) { return t == Task::Bilateral ? "bilateral" : "unilateral"; }

enum class Source { MMC, OMC, FP };

inline const char* to_string(Source s) {
  switch (s) {
    case Source::MMC: return "mmc";
    case Source::OMC: return "omc";
    case Source::FP: return "fp";
  }
  return "?";
}

struct RepetitionId {
  std::string participant;
  Task task = Task::Bilateral;
  int rep = 0;  // 1-based

  auto operator<=>(const RepetitionId&) const = default;
};

/// One repetition's vertical displacement (up-positive) with its apex sample.
struct JumpSegment {
  TimeSeries displacement;
  std::size_t apex_index = 0;
  std::size_t start_index = 0;  // offset of this window in the parent series
  Source source = Source::MMC;
  RepetitionId rep;

  void validate() const {
    require_nonempty(displacement, "JumpSegment.displacement");
    if (apex_index >= displacement.size())
      fail(errc::validation, "JumpSegment apex_index out of range");
    if (displacement.samples[apex_index] < max_value(displacement.samples))
      fail(errc::validation, "JumpSegment apex is not the global maximum");
  }
};

/// Reflect an image-coordinate series about the image height so that larger
/// values mean higher in the world. Involution: applying it twice is identity.
inline TimeSeries flip_image_vertical(const TimeSeries& series, int image_height_px) {
  require_unit(series, Unit::Pixels, "flip_image_vertical");
  TimeSeries out = series;
  const double h = static_cast<double>(image_height_px);
  for (double& v : out.samples) v = h - v;
  return out;
}

}  // namespace jm
