// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "jumpmetrics/core.hpp"

namespace jm {

/// One airborne interval on the force plate. toe_off_index is the first
/// sample inside the noise band of the unloaded plate, landing_index the
/// first sample rising back out of it.
struct FlightWindow {
  std::size_t toe_off_index = 0;
  std::size_t landing_index = 0;
  double flight_time_s = 0.0;
};

struct FlightDetectionConfig {
  double stance_load_frac = 0.5;      // loaded region = samples above this fraction of max
  double flight_threshold_frac = 0.05;  // candidate flight = force below this fraction of stance
  double noise_band_sds = 5.0;        // refined edges cross mean + k*sd of the unloaded noise
  double min_flight_s = 0.1;          // plausibility bounds for a countermovement jump
  double max_flight_s = 1.0;
};

/// Find flight windows in a vertical ground-reaction trace. Candidate
/// intervals are runs below a fraction of the stance force; their edges are
/// then refined against the noise statistics of the unloaded plate measured
/// inside each run.
inline std::vector<FlightWindow> detect_flight_windows(const ForceTrace& trace,
                                                       const FlightDetectionConfig& cfg = {}) {
  require_nonempty(trace.force, "detect_flight_windows");
  require_unit(trace.force, Unit::Newtons, "detect_flight_windows");
  require_rate(trace.force, "detect_flight_windows");
  const std::vector<double>& f = trace.force.samples;
  const std::size_t n = f.size();
  const double rate = trace.force.rate_hz;

  const double peak = max_value(f);
  std::vector<double> loaded;
  for (double v : f)
    if (v > cfg.stance_load_frac * peak) loaded.push_back(v);
  if (loaded.empty() || !(peak > 0.0))
    fail(errc::signal, "detect_flight_windows: no loaded (stance) region in trace");
  const double stance_force = median(loaded);
  const double flight_threshold = cfg.flight_threshold_frac * stance_force;

  std::vector<std::pair<std::size_t, std::size_t>> runs;  // [first, last] below threshold
  for (std::size_t i = 0; i < n;) {
    if (f[i] >= flight_threshold) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && f[j + 1] < flight_threshold) ++j;
    runs.emplace_back(i, j);
    i = j + 1;
  }
  if (runs.empty()) fail(errc::no_flight, "detect_flight_windows: no candidate flight interval");

  std::vector<FlightWindow> windows;
  for (const auto& [first, last] : runs) {
    const std::size_t len = last - first + 1;
    // Noise statistics over the run's interior, clear of the edge transients.
    const std::size_t margin = std::max<std::size_t>(1, len / 10);
    std::size_t ilo = first + margin, ihi = last - std::min(margin, last);
    if (ilo > ihi) {
      ilo = first;
      ihi = last;
    }
    std::vector<double> interior(f.begin() + static_cast<std::ptrdiff_t>(ilo),
                                 f.begin() + static_cast<std::ptrdiff_t>(ihi) + 1);
    const double band = mean(interior) + cfg.noise_band_sds * sample_sd(interior);

    // The candidate edges sit wherever the 5% threshold was crossed; the
    // true transitions are where the force enters/leaves the noise band of
    // the unloaded plate, so walk outward from the run's middle.
    const std::size_t mid = first + (last - first) / 2;
    if (f[mid] > band) continue;  // run never settles into the noise band
    std::size_t toe_off = mid;
    while (toe_off > 0 && f[toe_off - 1] <= band) --toe_off;
    std::size_t landing = mid;
    while (landing < n && f[landing] <= band) ++landing;
    if (landing >= n) continue;  // trace ends while still unloaded

    const double flight_time = static_cast<double>(landing - toe_off) / rate;
    if (flight_time < cfg.min_flight_s || flight_time > cfg.max_flight_s) continue;
    windows.push_back({toe_off, landing, flight_time});
  }
  if (windows.empty())
    fail(errc::no_flight, "detect_flight_windows: no flight interval within plausibility bounds");
  return windows;
}

/// Jump height in centimetres from flight time: h = 100 * g * T^2 / 8.
inline double height_from_flight_time(double flight_time_s, const Constants& constants = {}) {
  if (!(flight_time_s > 0.0))
    fail(errc::argument, "height_from_flight_time: flight time must be positive");
  return 100.0 * constants.g * flight_time_s * flight_time_s / 8.0;
}

}  // namespace jm
