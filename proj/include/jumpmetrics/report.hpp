// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "jumpmetrics/pipeline.hpp"

namespace jm {

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const PipelineConfig& cfg) {
  ordered_json j;
  j["zscore_window"] = cfg.denoise.zscore_window;
  j["zscore_threshold"] = cfg.denoise.zscore_threshold;
  j["savgol_window"] = cfg.denoise.savgol_window;
  j["savgol_order"] = cfg.denoise.savgol_order;
  j["half_window_s"] = cfg.segment.half_window_s;
  j["min_peak_prominence_frac"] = cfg.segment.min_peak_prominence_frac;
  j["min_peak_separation_s"] = cfg.segment.min_peak_separation_s;
  j["expected_reps"] = cfg.segment.expected_reps ? ordered_json(*cfg.segment.expected_reps)
                                                 : ordered_json(nullptr);
  j["min_confidence"] = cfg.min_confidence;
  j["max_low_conf_frac"] = cfg.max_low_conf_frac;
  j["max_speed_frac_image_height"] = cfg.max_speed_frac_image_height;
  j["fall_fraction"] = cfg.fall_fraction;
  j["g"] = cfg.constants.g;
  j["analysis_rate_hz"] = cfg.analysis_rate_hz;
  j["scale_mode"] = cfg.scale_mode == ScaleMode::PerRep ? "per_rep" : "session_mean";
  j["pool_participant_means"] = cfg.pool_participant_means;
  j["stance_load_frac"] = cfg.flight.stance_load_frac;
  j["flight_threshold_frac"] = cfg.flight.flight_threshold_frac;
  j["noise_band_sds"] = cfg.flight.noise_band_sds;
  j["min_flight_s"] = cfg.flight.min_flight_s;
  j["max_flight_s"] = cfg.flight.max_flight_s;
  return j;
}

inline ordered_json to_json(const SessionResult& s) {
  ordered_json j;
  j["participant"] = s.participant;
  j["task"] = to_string(s.task);
  ordered_json measurements = ordered_json::array();
  for (const JumpMeasurement& m : s.measurements) {
    ordered_json e;
    e["rep"] = m.rep.rep;
    e["method"] = to_string(m.method);
    e["height_cm"] = m.height_cm;
    measurements.push_back(std::move(e));
  }
  j["measurements"] = std::move(measurements);
  ordered_json exclusions = ordered_json::array();
  for (const Exclusion& e : s.exclusions) {
    ordered_json x;
    x["modality"] = e.modality;
    x["rep"] = e.rep.rep;  // 0 = whole modality
    x["reason"] = e.reason;
    exclusions.push_back(std::move(x));
  }
  j["exclusions"] = std::move(exclusions);
  ordered_json flags = ordered_json::array();
  for (const std::string& f : s.flags) flags.push_back(f);
  j["flags"] = std::move(flags);
  ordered_json cals = ordered_json::array();
  for (const ScaleCalibration& c : s.calibrations) {
    ordered_json x;
    x["rep"] = c.source_segment.rep;
    x["r_mm_per_px"] = c.r_mm_per_px;
    x["free_fall_duration_s"] = c.free_fall_duration_s;
    cals.push_back(std::move(x));
  }
  j["calibrations"] = std::move(cals);
  if (s.mean_r_mm_per_px) j["mean_r_mm_per_px"] = *s.mean_r_mm_per_px;
  ordered_json detected;
  for (const auto& [k, v] : s.detected) detected[k] = v;
  j["detected"] = std::move(detected);
  return j;
}

inline ordered_json to_json(const StudyReport& r, const PipelineConfig& cfg) {
  ordered_json j;
  j["config"] = to_json(cfg);
  ordered_json sessions = ordered_json::array();
  for (const SessionResult& s : r.sessions) sessions.push_back(to_json(s));
  j["sessions"] = std::move(sessions);

  ordered_json t1 = ordered_json::array();
  for (const Table1Row& row : r.table1) {
    ordered_json e;
    e["participant"] = row.participant;
    e["task"] = to_string(row.task);
    const auto put = [&](const char* key, const std::optional<double>& v) {
      e[key] = v ? ordered_json(*v) : ordered_json(nullptr);
    };
    put("fp_cm", row.fp_cm);
    put("omc_cm", row.omc_cm);
    put("rmm_cm", row.rmm_cm);
    put("ptm_cm", row.ptm_cm);
    t1.push_back(std::move(e));
  }
  j["table1_mean_heights"] = std::move(t1);

  ordered_json t2 = ordered_json::array();
  for (const TrrEntry& e : r.table2) {
    ordered_json x;
    x["method"] = to_string(e.method);
    x["task"] = to_string(e.task);
    x["computable"] = e.computable;
    if (e.computable) {
      x["trr_icc"] = e.icc;
      x["n_participants"] = e.n_participants;
      if (e.icc < 0.0) x["negative_icc"] = true;
    }
    t2.push_back(std::move(x));
  }
  j["table2_test_retest"] = std::move(t2);

  ordered_json t3 = ordered_json::array();
  for (const PairStats& p : r.table3) {
    ordered_json x;
    x["scope"] = to_string(p.scope);
    x["method"] = to_string(p.method);
    x["ground_truth"] = to_string(p.ground_truth);
    x["computable"] = p.computable;
    if (p.computable) {
      x["icc_2_1"] = p.icc.icc_2_1;
      if (p.icc.icc_2_1 < 0.0) x["negative_icc"] = true;
      x["bias_cm"] = p.ba.bias_cm;
      x["sd_cm"] = p.ba.sd_cm;
      x["loa_low_cm"] = p.ba.loa_low_cm;
      x["loa_high_cm"] = p.ba.loa_high_cm;
      x["n"] = p.ba.n;
    }
    t3.push_back(std::move(x));
  }
  j["table3_agreement"] = std::move(t3);
  return j;
}

namespace detail {

inline std::string csv_cell(const std::optional<double>& v, int decimals = 4) {
  return v ? fmt_fixed(*v, decimals) : std::string();
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace detail

inline void write_table1_csv(const std::filesystem::path& path, const StudyReport& r) {
  auto out = detail::open_out(path);
  out << "participant,task,fp_cm,omc_cm,rmm_cm,ptm_cm\n";
  for (const Table1Row& row : r.table1)
    out << row.participant << "," << to_string(row.task) << "," << detail::csv_cell(row.fp_cm)
        << "," << detail::csv_cell(row.omc_cm) << "," << detail::csv_cell(row.rmm_cm) << ","
        << detail::csv_cell(row.ptm_cm) << "\n";
}

inline void write_table2_csv(const std::filesystem::path& path, const StudyReport& r) {
  auto out = detail::open_out(path);
  out << "method,task,trr_icc,n_participants\n";
  for (const TrrEntry& e : r.table2) {
    out << to_string(e.method) << "," << to_string(e.task) << ",";
    if (e.computable)
      out << detail::fmt_fixed(e.icc, 6) << "," << e.n_participants;
    else
      out << ",";
    out << "\n";
  }
}

inline void write_table3_csv(const std::filesystem::path& path, const StudyReport& r) {
  auto out = detail::open_out(path);
  out << "scope,method,ground_truth,icc_2_1,bias_cm,loa_low_cm,loa_high_cm,n\n";
  for (const PairStats& p : r.table3) {
    out << to_string(p.scope) << "," << to_string(p.method) << "," << to_string(p.ground_truth)
        << ",";
    if (p.computable)
      out << detail::fmt_fixed(p.icc.icc_2_1, 6) << "," << detail::fmt_fixed(p.ba.bias_cm, 4) << ","
          << detail::fmt_fixed(p.ba.loa_low_cm, 4) << "," << detail::fmt_fixed(p.ba.loa_high_cm, 4)
          << "," << p.ba.n;
    else
      out << ",,,,";
    out << "\n";
  }
}

inline void write_ba_points_csv(const std::filesystem::path& path, const StudyReport& r) {
  auto out = detail::open_out(path);
  out << "scope,method,ground_truth,participant,task,rep,mean_cm,diff_cm,bias_cm,loa_low_cm,"
         "loa_high_cm\n";
  for (const BaPoint& p : r.ba_points) {
    const PairStats* stats = nullptr;
    for (const PairStats& ps : r.table3)
      if (ps.scope == p.scope && ps.method == p.method && ps.ground_truth == p.ground_truth)
        stats = &ps;
    out << to_string(p.scope) << "," << to_string(p.method) << "," << to_string(p.ground_truth)
        << "," << p.rep.participant << "," << to_string(p.rep.task) << "," << p.rep.rep << ","
        << detail::fmt_fixed(p.mean_cm, 4) << "," << detail::fmt_fixed(p.diff_cm, 4);
    if (stats && stats->computable)
      out << "," << detail::fmt_fixed(stats->ba.bias_cm, 4) << ","
          << detail::fmt_fixed(stats->ba.loa_low_cm, 4) << ","
          << detail::fmt_fixed(stats->ba.loa_high_cm, 4);
    else
      out << ",,,";
    out << "\n";
  }
}

inline void write_report_json(const std::filesystem::path& path, const StudyReport& r,
                              const PipelineConfig& cfg) {
  auto out = detail::open_out(path);
  out << to_json(r, cfg).dump(2) << "\n";
}

}  // namespace jm
