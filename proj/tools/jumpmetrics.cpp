// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: synthesize sessions, analyze single sessions, run
// whole studies, and compute standalone agreement statistics on height CSVs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jumpmetrics/jumpmetrics.hpp"

namespace fs = std::filesystem;

namespace {

jm::PipelineConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  return jm::parse_config(path);
}

std::vector<jm::SessionManifest> collect_manifests(const std::string& arg) {
  std::vector<fs::path> paths;
  if (fs::is_directory(arg)) {
    for (const auto& entry : fs::directory_iterator(arg))
      if (entry.is_regular_file() && entry.path().extension() == ".manifest")
        paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
  } else {
    std::string rest = arg;
    while (!rest.empty()) {
      const std::size_t comma = rest.find(',');
      paths.emplace_back(rest.substr(0, comma));
      if (comma == std::string::npos) break;
      rest.erase(0, comma + 1);
    }
  }
  if (paths.empty()) jm::fail(jm::errc::argument, "no manifests found in '" + arg + "'");
  std::vector<jm::SessionManifest> manifests;
  manifests.reserve(paths.size());
  for (const fs::path& p : paths) manifests.push_back(jm::parse_manifest(p));
  return manifests;
}

void write_study_outputs(const fs::path& out_dir, const jm::StudyReport& report,
                         const jm::PipelineConfig& cfg) {
  fs::create_directories(out_dir);
  jm::write_report_json(out_dir / "report.json", report, cfg);
  jm::write_table1_csv(out_dir / "table1.csv", report);
  jm::write_table2_csv(out_dir / "table2.csv", report);
  jm::write_table3_csv(out_dir / "table3.csv", report);
  jm::write_ba_points_csv(out_dir / "ba_points.csv", report);
}

// Numeric CSV reader for the standalone stats commands: a header row
// followed by rows of equal arity.
std::vector<std::vector<double>> read_matrix_csv(const fs::path& path) {
  std::vector<std::vector<double>> rows;
  bool header_skipped = false;
  std::size_t lineno = 0;
  for (const std::string& raw : jm::detail::read_lines(path)) {
    ++lineno;
    const std::string_view line = jm::detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!header_skipped) {
      header_skipped = true;
      continue;
    }
    std::vector<double> row;
    for (std::string_view tok : jm::detail::split(line, ','))
      row.push_back(jm::detail::parse_double(tok, path.string() + ":" + std::to_string(lineno)));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) jm::fail(jm::errc::format, path.string() + ": no data rows");
  return rows;
}

int cmd_synth(const jm::SynthJumpSpec& spec, const std::string& participant,
              const std::string& task_name, const fs::path& out_dir) {
  jm::Task task = jm::Task::Bilateral;
  if (task_name == "unilateral") task = jm::Task::Unilateral;
  else if (task_name != "bilateral")
    jm::fail(jm::errc::argument, "task must be bilateral or unilateral");

  const jm::SynthSession session = jm::generate(spec);
  fs::create_directories(out_dir);
  const std::string stem = participant + "_" + jm::to_string(task);
  jm::write_keypoints(out_dir / (stem + ".keypoints.txt"), session.keypoints);
  jm::write_markers(out_dir / (stem + ".markers.csv"), session.markers);
  jm::write_force(out_dir / (stem + ".force.csv"), session.force);

  jm::SessionManifest manifest;
  manifest.participant = participant;
  manifest.task = task;
  manifest.keypoints_path = out_dir / (stem + ".keypoints.txt");
  manifest.markers_path = out_dir / (stem + ".markers.csv");
  manifest.force_path = out_dir / (stem + ".force.csv");
  manifest.hip_marker = "hip";
  manifest.toe_marker = "toe";
  manifest.fps = spec.fps;
  manifest.omc_hz = spec.omc_rate_hz;
  manifest.fp_hz = spec.fp_rate_hz;
  jm::write_manifest(out_dir / (stem + ".manifest"), manifest);

  nlohmann::ordered_json truth;
  truth["scale_mm_per_px"] = session.truth.scale_mm_per_px;
  truth["hip_stance_mm"] = session.truth.hip_stance_mm;
  truth["toe_stance_mm"] = session.truth.toe_stance_mm;
  truth["duration_s"] = session.truth.duration_s;
  truth["reps"] = nlohmann::ordered_json::array();
  for (const jm::RepTruth& r : session.truth.reps) {
    nlohmann::ordered_json e;
    e["rep"] = r.rep;
    e["toe_off_s"] = r.toe_off_s;
    e["landing_s"] = r.landing_s;
    e["apex_s"] = r.apex_s;
    e["flight_time_s"] = r.flight_time_s;
    e["height_cm"] = r.height_cm;
    truth["reps"].push_back(std::move(e));
  }
  std::ofstream tf(out_dir / (stem + ".truth.json"));
  tf << truth.dump(2) << "\n";

  std::cout << "wrote session " << stem << " to " << out_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Countermovement-jump height from keypoints, markers and force plates"};
  app.require_subcommand(1);

  // analyze
  std::string analyze_manifest, analyze_config, analyze_out;
  CLI::App* analyze = app.add_subcommand("analyze", "Process one session manifest");
  analyze->add_option("--manifest", analyze_manifest, "Session manifest path")->required();
  analyze->add_option("--config", analyze_config, "Pipeline config file");
  analyze->add_option("--out", analyze_out, "Output directory")->required();

  // study
  std::string study_manifests, study_config, study_out;
  CLI::App* study = app.add_subcommand("study", "Process a set of session manifests");
  study->add_option("--manifests", study_manifests, "Directory of *.manifest files or comma list")
      ->required();
  study->add_option("--config", study_config, "Pipeline config file");
  study->add_option("--out", study_out, "Output directory")->required();

  // synth
  jm::SynthJumpSpec spec;
  std::string synth_out, synth_participant = "P01", synth_task = "bilateral";
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic ground-truth session");
  synth->add_option("--height-cm", spec.true_height_cm, "True jump height (cm)");
  synth->add_option("--reps", spec.reps, "Repetitions");
  synth->add_option("--scale", spec.scale_mm_per_px, "True scale (mm per px)");
  synth->add_option("--seed", spec.seed, "Random seed");
  synth->add_option("--noise-px", spec.noise_px_sd, "Keypoint noise SD (px)");
  synth->add_option("--noise-n", spec.noise_n_sd, "Force noise SD (N)");
  synth->add_option("--fps", spec.fps, "Camera frame rate");
  synth->add_option("--participant", synth_participant, "Participant id");
  synth->add_option("--task", synth_task, "bilateral or unilateral");
  synth->add_option("--spikes", spec.spikes_per_series, "Injected pose spikes per joint");
  synth->add_option("--out", synth_out, "Output directory")->required();

  // stats
  std::string stats_input;
  CLI::App* stats = app.add_subcommand("stats", "Standalone statistics on height tables");
  stats->require_subcommand(1);
  CLI::App* stats_icc = stats->add_subcommand("icc", "ICC(2,1) over a numeric CSV matrix");
  stats_icc->add_option("--input", stats_input, "CSV path")->required();
  CLI::App* stats_ba = stats->add_subcommand("ba", "Bland-Altman on a two-column CSV");
  stats_ba->add_option("--input", stats_input, "CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      const jm::PipelineConfig cfg = load_config(analyze_config);
      const jm::SessionManifest manifest = jm::parse_manifest(analyze_manifest);
      jm::StudyReport report = jm::aggregate_study({jm::run_session(manifest, cfg)}, cfg);
      write_study_outputs(analyze_out, report, cfg);
      std::cout << "analyzed " << manifest.participant << " (" << jm::to_string(manifest.task)
                << "): " << report.sessions.front().measurements.size() << " measurements, "
                << report.sessions.front().exclusions.size() << " exclusions\n";
    } else if (*study) {
      const jm::PipelineConfig cfg = load_config(study_config);
      const std::vector<jm::SessionManifest> manifests = collect_manifests(study_manifests);
      const jm::StudyReport report = jm::run_study(manifests, cfg);
      write_study_outputs(study_out, report, cfg);
      std::cout << "study: " << report.sessions.size() << " sessions\n";
    } else if (*synth) {
      return cmd_synth(spec, synth_participant, synth_task, synth_out);
    } else if (*stats) {
      const auto matrix = read_matrix_csv(stats_input);
      if (*stats_icc) {
        std::cout << "icc_2_1 = " << jm::detail::fmt_fixed(jm::icc_2_1_value(matrix), 6) << "\n";
      } else {
        std::vector<double> a, b;
        for (const auto& row : matrix) {
          if (row.size() != 2)
            jm::fail(jm::errc::format, "ba expects exactly two numeric columns");
          a.push_back(row[0]);
          b.push_back(row[1]);
        }
        const jm::BlandAltmanResult r = jm::bland_altman(a, b);
        std::cout << "bias_cm = " << jm::detail::fmt_fixed(r.bias_cm, 4) << "\n"
                  << "sd_cm = " << jm::detail::fmt_fixed(r.sd_cm, 4) << "\n"
                  << "loa = [" << jm::detail::fmt_fixed(r.loa_low_cm, 4) << ", "
                  << jm::detail::fmt_fixed(r.loa_high_cm, 4) << "]\n"
                  << "n = " << r.n << "\n";
      }
    }
  } catch (const jm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
