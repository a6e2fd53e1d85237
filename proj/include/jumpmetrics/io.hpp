// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jumpmetrics/core.hpp"

namespace jm {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

inline double parse_double(std::string_view tok, const std::string& where) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    fail(errc::format, where + ": cannot parse number '" + std::string(tok) + "'");
  if (!std::isfinite(v)) fail(errc::validation, where + ": non-finite value");
  return v;
}

inline long parse_long(std::string_view tok, const std::string& where) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    fail(errc::format, where + ": cannot parse integer '" + std::string(tok) + "'");
  return v;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io, "cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

inline std::string fmt_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace detail

/// Parse a `key = value` text file. Lines starting with '#' and blank lines
/// are ignored; duplicate keys are rejected.
inline std::map<std::string, std::string> parse_keyvalue_file(const std::filesystem::path& path) {
  std::map<std::string, std::string> kv;
  std::size_t lineno = 0;
  for (const std::string& raw : detail::read_lines(path)) {
    ++lineno;
    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(errc::format, path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty())
      fail(errc::format, path.string() + ":" + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second)
      fail(errc::format, path.string() + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return kv;
}

// --- keypoints file ---
// Header: `#fps=30`, `#image_height=720`, `#joints=name,name,...`
// Data:   `frame_index, x1,y1,c1, x2,y2,c2, ...`

inline KeypointRecording parse_keypoints(const std::filesystem::path& path) {
  KeypointRecording rec;
  bool have_fps = false, have_height = false;
  std::vector<long> missing;
  std::size_t lineno = 0;
  const std::string where = path.string();

  for (const std::string& raw : detail::read_lines(path)) {
    ++lineno;
    const std::string_view line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) continue;  // plain comment
      const std::string_view key = detail::trim(line.substr(1, eq - 1));
      const std::string_view value = detail::trim(line.substr(eq + 1));
      if (key == "fps") {
        rec.fps = detail::parse_double(value, where + " fps");
        have_fps = true;
      } else if (key == "image_height") {
        rec.image_height_px = static_cast<int>(detail::parse_long(value, where + " image_height"));
        have_height = true;
      } else if (key == "joints") {
        for (std::string_view name : detail::split(value, ',')) {
          if (name.empty()) fail(errc::format, where + ": empty joint name in header");
          if (rec.has_joint(std::string(name)))
            fail(errc::format, where + ": duplicate joint name '" + std::string(name) + "'");
          rec.joint_names.emplace_back(name);
        }
      }
      continue;
    }

    if (rec.joint_names.empty())
      fail(errc::format, where + ":" + std::to_string(lineno) + ": data before #joints header");
    const std::vector<std::string_view> tok = detail::split(line, ',');
    const std::size_t k = rec.joint_names.size();
    if (tok.size() != 1 + 3 * k)
      fail(errc::format, where + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(1 + 3 * k) + " fields, got " + std::to_string(tok.size()));
    KeypointFrame frame;
    frame.index = detail::parse_long(tok[0], where + ":" + std::to_string(lineno));
    if (!rec.frames.empty()) {
      const long prev = rec.frames.back().index;
      if (frame.index <= prev)
        fail(errc::format, where + ":" + std::to_string(lineno) + ": frame index not increasing");
      for (long miss = prev + 1; miss < frame.index; ++miss) missing.push_back(miss);
    }
    frame.joints.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
      const std::string cell = where + ":" + std::to_string(lineno) + " joint " + rec.joint_names[j];
      frame.joints[j].x_px = detail::parse_double(tok[1 + 3 * j], cell);
      frame.joints[j].y_px = detail::parse_double(tok[2 + 3 * j], cell);
      frame.joints[j].confidence = detail::parse_double(tok[3 + 3 * j], cell);
      const double c = frame.joints[j].confidence;
      if (c < 0.0 || c > 1.0)
        fail(errc::validation, cell + ": confidence " + detail::fmt_fixed(c, 3) + " outside [0, 1]");
    }
    rec.frames.push_back(std::move(frame));
  }

  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) {
      if (i) list += ",";
      list += std::to_string(missing[i]);
    }
    if (missing.size() > 20) list += ",...";
    fail(errc::frame_gap, where + ": missing frame indices " + list);
  }
  if (rec.frames.empty()) fail(errc::format, where + ": no frames");
  if (!have_fps || !(rec.fps > 0.0)) fail(errc::validation, where + ": missing or non-positive fps");
  if (!have_height || rec.image_height_px <= 0)
    fail(errc::validation, where + ": missing or non-positive image_height");
  return rec;
}

inline void write_keypoints(const std::filesystem::path& path, const KeypointRecording& rec) {
  std::ofstream out(path);
  if (!out) fail(errc::io, "cannot write '" + path.string() + "'");
  out << "#fps=" << detail::fmt_fixed(rec.fps, 3) << "\n";
  out << "#image_height=" << rec.image_height_px << "\n";
  out << "#joints=";
  for (std::size_t i = 0; i < rec.joint_names.size(); ++i)
    out << (i ? "," : "") << rec.joint_names[i];
  out << "\n";
  for (const KeypointFrame& f : rec.frames) {
    out << f.index;
    for (const Joint& j : f.joints)
      out << ", " << detail::fmt_fixed(j.x_px, 3) << "," << detail::fmt_fixed(j.y_px, 3) << ","
          << detail::fmt_fixed(j.confidence, 3);
    out << "\n";
  }
}

// --- markers file ---
// `#rate_hz=100` plus a CSV header `time_s,<marker>_x,<marker>_y,<marker>_z,...`, values in mm.

inline MarkerRecording parse_markers(const std::filesystem::path& path) {
  MarkerRecording rec;
  const std::string where = path.string();
  bool have_rate = false;
  std::vector<std::pair<std::string, char>> columns;  // marker name + axis per data column
  std::size_t lineno = 0, rows = 0;

  for (const std::string& raw : detail::read_lines(path)) {
    ++lineno;
    const std::string_view line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) continue;
      const std::string_view key = detail::trim(line.substr(1, eq - 1));
      if (key == "rate_hz") {
        rec.rate_hz = detail::parse_double(detail::trim(line.substr(eq + 1)), where + " rate_hz");
        have_rate = true;
      }
      continue;
    }
    if (columns.empty()) {
      const std::vector<std::string_view> names = detail::split(line, ',');
      if (names.empty() || names[0] != "time_s")
        fail(errc::format, where + ": header row must start with time_s");
      for (std::size_t i = 1; i < names.size(); ++i) {
        const std::string_view name = names[i];
        const std::size_t us = name.rfind('_');
        if (us == std::string_view::npos || us + 2 != name.size())
          fail(errc::format, where + ": column '" + std::string(name) + "' is not <marker>_<axis>");
        const char axis = name.back();
        if (axis != 'x' && axis != 'y' && axis != 'z')
          fail(errc::format, where + ": column '" + std::string(name) + "' axis must be x, y or z");
        const std::string marker(name.substr(0, us));
        if (rec.markers.find(marker) == rec.markers.end()) {
          rec.markers.emplace(marker, MarkerSeries{});
          rec.marker_order.push_back(marker);
        }
        columns.emplace_back(marker, axis);
      }
      continue;
    }
    const std::vector<std::string_view> tok = detail::split(line, ',');
    if (tok.size() != columns.size() + 1)
      fail(errc::format, where + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(columns.size() + 1) + " cells, got " +
                             std::to_string(tok.size()));
    ++rows;
    detail::parse_double(tok[0], where + ": row " + std::to_string(rows) + ", column 1");
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const double v = detail::parse_double(
          tok[c + 1], where + ": row " + std::to_string(rows) + ", column " + std::to_string(c + 2));
      MarkerSeries& ms = rec.markers[columns[c].first];
      TimeSeries& axis = columns[c].second == 'x' ? ms.x : columns[c].second == 'y' ? ms.y : ms.z;
      axis.samples.push_back(v);
    }
  }

  if (columns.empty()) fail(errc::format, where + ": missing header row");
  if (rows == 0) fail(errc::format, where + ": no data rows");
  if (!have_rate) fail(errc::format, where + ": missing #rate_hz header");
  if (!(rec.rate_hz > 0.0)) fail(errc::validation, where + ": rate_hz must be positive");

  for (const std::string& name : rec.marker_order) {
    MarkerSeries& ms = rec.markers[name];
    for (TimeSeries* axis : {&ms.x, &ms.y, &ms.z}) {
      axis->rate_hz = rec.rate_hz;
      axis->unit = Unit::Millimetres;
    }
    if (ms.x.size() != rows || ms.y.size() != rows || ms.z.size() != rows)
      fail(errc::format, where + ": header missing axis column for marker '" + name + "'");
  }
  return rec;
}

inline void write_markers(const std::filesystem::path& path, const MarkerRecording& rec) {
  std::ofstream out(path);
  if (!out) fail(errc::io, "cannot write '" + path.string() + "'");
  out << "#rate_hz=" << detail::fmt_fixed(rec.rate_hz, 3) << "\n";
  out << "time_s";
  for (const std::string& name : rec.marker_order)
    out << "," << name << "_x," << name << "_y," << name << "_z";
  out << "\n";
  const std::size_t n = rec.markers.at(rec.marker_order.front()).x.size();
  for (std::size_t i = 0; i < n; ++i) {
    out << detail::fmt_fixed(static_cast<double>(i) / rec.rate_hz, 6);
    for (const std::string& name : rec.marker_order) {
      const MarkerSeries& ms = rec.markers.at(name);
      out << "," << detail::fmt_fixed(ms.x.samples[i], 4) << "," << detail::fmt_fixed(ms.y.samples[i], 4)
          << "," << detail::fmt_fixed(ms.z.samples[i], 4);
    }
    out << "\n";
  }
}

// --- force file ---
// CSV `time_s,fz_n` or single-column `fz_n` with `#rate_hz=1000`.

inline ForceTrace parse_force(const std::filesystem::path& path) {
  const std::string where = path.string();
  std::optional<double> header_rate;
  bool has_time_col = false;
  bool header_seen = false;
  std::vector<double> times, values;
  std::size_t lineno = 0;

  for (const std::string& raw : detail::read_lines(path)) {
    ++lineno;
    const std::string_view line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) continue;
      if (detail::trim(line.substr(1, eq - 1)) == "rate_hz")
        header_rate = detail::parse_double(detail::trim(line.substr(eq + 1)), where + " rate_hz");
      continue;
    }
    if (!header_seen) {
      const std::vector<std::string_view> names = detail::split(line, ',');
      if (names.size() == 2 && names[0] == "time_s" && names[1] == "fz_n")
        has_time_col = true;
      else if (names.size() == 1 && names[0] == "fz_n")
        has_time_col = false;
      else
        fail(errc::format, where + ": header row must be 'time_s,fz_n' or 'fz_n'");
      header_seen = true;
      continue;
    }
    const std::vector<std::string_view> tok = detail::split(line, ',');
    if (tok.size() != (has_time_col ? 2u : 1u))
      fail(errc::format, where + ":" + std::to_string(lineno) + ": wrong cell count");
    if (has_time_col) {
      times.push_back(detail::parse_double(tok[0], where + ":" + std::to_string(lineno)));
      values.push_back(detail::parse_double(tok[1], where + ":" + std::to_string(lineno)));
    } else {
      values.push_back(detail::parse_double(tok[0], where + ":" + std::to_string(lineno)));
    }
  }

  if (!header_seen || values.empty()) fail(errc::format, where + ": no force samples");
  if (header_rate && !(*header_rate > 0.0))
    fail(errc::validation, where + ": rate_hz must be positive");

  double rate = 0.0;
  if (has_time_col && times.size() >= 2) {
    const double dt = times[1] - times[0];
    if (!(dt > 0.0)) fail(errc::format, where + ": time column not increasing");
    for (std::size_t i = 1; i < times.size(); ++i) {
      const double step = times[i] - times[i - 1];
      if (std::fabs(step - dt) > 1e-6)
        fail(errc::format, where + ": non-uniform sampling near row " + std::to_string(i + 1));
    }
    rate = 1.0 / dt;
    if (header_rate && std::fabs(*header_rate - rate) > 1e-3 * rate)
      fail(errc::validation, where + ": header rate_hz disagrees with time column");
  } else {
    if (!header_rate)
      fail(errc::format, where + ": #rate_hz header required without a usable time column");
    rate = *header_rate;
  }

  ForceTrace trace;
  trace.force.samples = std::move(values);
  trace.force.rate_hz = rate;
  trace.force.unit = Unit::Newtons;
  return trace;
}

inline void write_force(const std::filesystem::path& path, const ForceTrace& trace,
                        bool with_time_column = false) {
  std::ofstream out(path);
  if (!out) fail(errc::io, "cannot write '" + path.string() + "'");
  out << "#rate_hz=" << detail::fmt_fixed(trace.force.rate_hz, 3) << "\n";
  if (with_time_column) {
    out << "time_s,fz_n\n";
    for (std::size_t i = 0; i < trace.size(); ++i)
      out << detail::fmt_fixed(static_cast<double>(i) / trace.force.rate_hz, 6) << ","
          << detail::fmt_fixed(trace.force.samples[i], 4) << "\n";
  } else {
    out << "fz_n\n";
    for (double v : trace.force.samples) out << detail::fmt_fixed(v, 4) << "\n";
  }
}

// --- session manifest ---

struct SessionManifest {
  std::string participant;
  Task task = Task::Bilateral;
  std::filesystem::path keypoints_path;
  std::optional<std::filesystem::path> markers_path;
  std::optional<std::filesystem::path> force_path;
  std::string hip_joint = "hip";
  std::string toe_joint = "small_toe";
  std::string hip_marker = "hip";
  std::string toe_marker = "toe";
  // Declared rates are cross-checked against the file headers when present.
  std::optional<double> fps;
  std::optional<double> omc_hz;
  std::optional<double> fp_hz;
};

inline SessionManifest parse_manifest(const std::filesystem::path& path) {
  const std::map<std::string, std::string> kv = parse_keyvalue_file(path);
  const std::string where = path.string();
  SessionManifest m;

  const auto get = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end() || it->second.empty()) return std::nullopt;
    return it->second;
  };
  const auto require = [&](const char* key) -> std::string {
    auto v = get(key);
    if (!v) fail(errc::validation, where + ": missing required key '" + std::string(key) + "'");
    return *v;
  };

  m.participant = require("participant");
  const std::string task = require("task");
  if (task == "bilateral")
    m.task = Task::Bilateral;
  else if (task == "unilateral")
    m.task = Task::Unilateral;
  else
    fail(errc::validation, where + ": task must be bilateral or unilateral");

  const std::filesystem::path base = path.parent_path();
  const auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  m.keypoints_path = resolve(require("keypoints"));
  if (auto v = get("markers")) m.markers_path = resolve(*v);
  if (auto v = get("force")) m.force_path = resolve(*v);

  if (auto v = get("hip_joint")) m.hip_joint = *v;
  if (auto v = get("toe_joint")) m.toe_joint = *v;
  if (auto v = get("hip_marker")) m.hip_marker = *v;
  if (auto v = get("toe_marker")) m.toe_marker = *v;
  if (auto v = get("fps")) m.fps = detail::parse_double(*v, where + " fps");
  if (auto v = get("omc_hz")) m.omc_hz = detail::parse_double(*v, where + " omc_hz");
  if (auto v = get("fp_hz")) m.fp_hz = detail::parse_double(*v, where + " fp_hz");
  for (const auto& rate : {m.fps, m.omc_hz, m.fp_hz})
    if (rate && !(*rate > 0.0))
      fail(errc::validation, where + ": declared rates must be positive");
  return m;
}

inline void write_manifest(const std::filesystem::path& path, const SessionManifest& m) {
  std::ofstream out(path);
  if (!out) fail(errc::io, "cannot write '" + path.string() + "'");
  out << "participant = " << m.participant << "\n";
  out << "task = " << to_string(m.task) << "\n";
  out << "keypoints = " << m.keypoints_path.filename().string() << "\n";
  if (m.markers_path) out << "markers = " << m.markers_path->filename().string() << "\n";
  if (m.force_path) out << "force = " << m.force_path->filename().string() << "\n";
  out << "hip_joint = " << m.hip_joint << "\n";
  out << "toe_joint = " << m.toe_joint << "\n";
  out << "hip_marker = " << m.hip_marker << "\n";
  out << "toe_marker = " << m.toe_marker << "\n";
  if (m.fps) out << "fps = " << detail::fmt_fixed(*m.fps, 3) << "\n";
  if (m.omc_hz) out << "omc_hz = " << detail::fmt_fixed(*m.omc_hz, 3) << "\n";
  if (m.fp_hz) out << "fp_hz = " << detail::fmt_fixed(*m.fp_hz, 3) << "\n";
}

// --- vertical extraction ---

struct KeypointTrack {
  TimeSeries position;    // pixels, up-positive
  TimeSeries confidence;  // [0, 1]
};

/// Pull one joint's vertical track out of a keypoint recording, flipped to
/// up-positive world orientation, along with its confidence series.
inline KeypointTrack extract_vertical(const KeypointRecording& rec, const std::string& joint) {
  const std::size_t j = rec.joint_index(joint);
  KeypointTrack track;
  track.position.rate_hz = rec.fps;
  track.position.unit = Unit::Pixels;
  track.confidence.rate_hz = rec.fps;
  track.confidence.unit = Unit::Normalized;
  track.position.samples.reserve(rec.frames.size());
  track.confidence.samples.reserve(rec.frames.size());
  for (const KeypointFrame& f : rec.frames) {
    track.position.samples.push_back(f.joints[j].y_px);
    track.confidence.samples.push_back(f.joints[j].confidence);
  }
  track.position = flip_image_vertical(track.position, rec.image_height_px);
  return track;
}

/// Pull one marker's vertical-axis series (unchanged, millimetres).
inline TimeSeries extract_vertical(const MarkerRecording& rec, const std::string& marker) {
  const MarkerSeries& ms = rec.at(marker);
  switch (rec.vertical_axis) {
    case 'x': return ms.x;
    case 'y': return ms.y;
    default: return ms.z;
  }
}

}  // namespace jm
