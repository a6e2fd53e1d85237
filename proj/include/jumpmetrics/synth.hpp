// Copyright (C) 2026 the jumpmetrics authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "jumpmetrics/core.hpp"

namespace jm {

/// Parameters for a synthetic countermovement-jump session. Trajectories are
/// exact ballistic parabolas between toe-off and landing; the contact phases
/// are quintic splines joined with continuous acceleration, so the emitted
/// force trace (F = m * (a + g)) is consistent with the displacement.
struct SynthJumpSpec {
  double true_height_cm = 20.0;
  int reps = 3;
  double scale_mm_per_px = 3.5;
  double fps = 30.0;
  double omc_rate_hz = 100.0;
  double fp_rate_hz = 1000.0;
  double noise_px_sd = 0.0;
  double noise_n_sd = 0.0;
  double stance_force_n = 750.0;
  double countermovement_depth_cm = 10.0;
  unsigned long long seed = 1;

  // shape parameters; defaults give plausible jump mechanics
  double lead_in_s = 1.0;
  double rep_period_s = 4.0;
  double dip_duration_s = 0.6;
  double push_duration_s = 0.35;
  double landing_absorb_s = 0.30;
  double recover_duration_s = 0.6;
  double extension_offset_cm = 5.0;  // hip rise above stance at toe-off
  double turn_acc_mps2 = 8.0;        // upward acceleration at the countermovement turn
  double toe_blend_s = 0.12;         // foot roll before toe-off / after landing
  double toe_inset_s = 0.06;         // flight margin where the toe joins its arc
  int image_height_px = 720;
  double hip_stance_mm = 900.0;
  double toe_stance_mm = 30.0;
  int spikes_per_series = 0;         // optional pose-glitch injection
  double spike_px = 150.0;

  void validate() const {
    if (!(true_height_cm > 0.0)) fail(errc::argument, "true_height_cm must be positive");
    if (reps < 1) fail(errc::argument, "reps must be >= 1");
    if (!(scale_mm_per_px > 0.0)) fail(errc::argument, "scale_mm_per_px must be positive");
    if (!(fps > 0.0) || !(omc_rate_hz > 0.0) || !(fp_rate_hz > 0.0))
      fail(errc::argument, "rates must be positive");
    if (noise_px_sd < 0.0 || noise_n_sd < 0.0) fail(errc::argument, "noise SDs must be >= 0");
    if (!(stance_force_n > 0.0)) fail(errc::argument, "stance_force_n must be positive");
    if (countermovement_depth_cm < 0.0) fail(errc::argument, "depth must be >= 0");
  }
};

struct RepTruth {
  int rep = 0;
  double toe_off_s = 0.0;
  double landing_s = 0.0;
  double apex_s = 0.0;
  double flight_time_s = 0.0;
  double height_cm = 0.0;
};

struct SynthTruth {
  double scale_mm_per_px = 0.0;
  double hip_stance_mm = 0.0;
  double toe_stance_mm = 0.0;
  double duration_s = 0.0;
  std::vector<RepTruth> reps;
};

namespace detail {

/// Quintic with prescribed position/velocity/acceleration at both ends.
struct Quintic {
  double t0 = 0.0, tau = 1.0;
  std::array<double, 6> c{};

  static Quintic fit(double t0, double tau, double p0, double v0, double a0, double p1, double v1,
                     double a1) {
    Quintic q;
    q.t0 = t0;
    q.tau = tau;
    const double d = p1 - p0;
    const double sv0 = v0 * tau, sv1 = v1 * tau;
    const double sa0 = a0 * tau * tau, sa1 = a1 * tau * tau;
    q.c = {p0,
           sv0,
           0.5 * sa0,
           10.0 * d - 6.0 * sv0 - 4.0 * sv1 - 1.5 * sa0 + 0.5 * sa1,
           -15.0 * d + 8.0 * sv0 + 7.0 * sv1 + 1.5 * sa0 - sa1,
           6.0 * d - 3.0 * (sv0 + sv1) - 0.5 * (sa0 - sa1)};
    return q;
  }

  double pos(double t) const {
    const double u = (t - t0) / tau;
    return c[0] + u * (c[1] + u * (c[2] + u * (c[3] + u * (c[4] + u * c[5]))));
  }

  double acc(double t) const {
    const double u = (t - t0) / tau;
    return (2.0 * c[2] + u * (6.0 * c[3] + u * (12.0 * c[4] + u * 20.0 * c[5]))) / (tau * tau);
  }
};

}  // namespace detail

/// Continuous-time model of the whole session; sampling and noise live in
/// generate(). Exposed so tests can probe the exact kinematics.
class SynthTrajectory {
 public:
  explicit SynthTrajectory(const SynthJumpSpec& spec) : spec_(spec) {
    spec.validate();
    const double g = constants_.g;
    const double h_m = spec.true_height_cm / 100.0;
    const double flight = std::sqrt(8.0 * spec.true_height_cm / (100.0 * g));
    const double v0 = 0.5 * g * flight;
    const double depth = spec.countermovement_depth_cm / 100.0;
    const double ext = spec.extension_offset_cm / 100.0;

    truth_.scale_mm_per_px = spec.scale_mm_per_px;
    truth_.hip_stance_mm = spec.hip_stance_mm;
    truth_.toe_stance_mm = spec.toe_stance_mm;

    for (int r = 0; r < spec.reps; ++r) {
      Rep rep;
      rep.t_dip = spec.lead_in_s + r * spec.rep_period_s;
      const double t_dip_end = rep.t_dip + spec.dip_duration_s;
      // Snap the apex onto the camera frame grid; the push absorbs the shift.
      const double apex_nominal = t_dip_end + spec.push_duration_s + 0.5 * flight;
      rep.t_apex = std::round(apex_nominal * spec.fps) / spec.fps;
      rep.t_toe_off = rep.t_apex - 0.5 * flight;
      rep.t_land = rep.t_apex + 0.5 * flight;
      const double push_tau = rep.t_toe_off - t_dip_end;
      if (!(push_tau > 0.05))
        fail(errc::argument, "synth: push phase collapsed; increase push_duration_s");

      // The dip bottoms out already accelerating upward, so the push rises
      // monotonically instead of plunging below the countermovement depth.
      rep.dip = detail::Quintic::fit(rep.t_dip, spec.dip_duration_s, 0.0, 0.0, 0.0, -depth, 0.0,
                                     spec.turn_acc_mps2);
      rep.push = detail::Quintic::fit(t_dip_end, push_tau, -depth, 0.0, spec.turn_acc_mps2, ext,
                                      v0, -g);
      rep.land = detail::Quintic::fit(rep.t_land, spec.landing_absorb_s, ext, -v0, -g, -depth, 0.0, 0.0);
      rep.recover = detail::Quintic::fit(rep.t_land + spec.landing_absorb_s, spec.recover_duration_s,
                                         -depth, 0.0, 0.0, 0.0, 0.0, 0.0);
      rep.apex_y = ext + h_m;

      // Toe: flat during contact, ballistic arc with apex = true height during
      // flight, C2 roll blends just around toe-off and landing.
      const double inset = spec.toe_inset_s;
      rep.toe_join_in = rep.t_toe_off + inset;
      rep.toe_join_out = rep.t_land - inset;
      const double off = rep.toe_join_in - rep.t_apex;  // negative
      const double y_join = h_m - 0.5 * g * off * off;
      const double v_join = -g * off;
      rep.toe_pre = detail::Quintic::fit(rep.t_toe_off - spec.toe_blend_s,
                                         spec.toe_blend_s + inset, 0.0, 0.0, 0.0, y_join, v_join, -g);
      rep.toe_post = detail::Quintic::fit(rep.toe_join_out, spec.toe_blend_s + inset, y_join,
                                          -v_join, -g, 0.0, 0.0, 0.0);

      truth_.reps.push_back({r + 1, rep.t_toe_off, rep.t_land, rep.t_apex, flight,
                             spec.true_height_cm});
      reps_.push_back(rep);
    }
    truth_.duration_s = spec.lead_in_s + spec.reps * spec.rep_period_s;
  }

  /// Hip displacement in metres relative to the stance hip level.
  double hip_m(double t) const {
    const Rep* r = find(t);
    if (!r) return 0.0;
    const double g = constants_.g;
    if (t >= r->t_toe_off && t < r->t_land) {
      const double dt = t - r->t_apex;
      return r->apex_y - 0.5 * g * dt * dt;
    }
    if (t >= r->t_dip && t < r->dip.t0 + r->dip.tau) return r->dip.pos(t);
    if (t >= r->push.t0 && t < r->t_toe_off) return r->push.pos(t);
    if (t >= r->t_land && t < r->land.t0 + r->land.tau) return r->land.pos(t);
    if (t >= r->recover.t0 && t < r->recover.t0 + r->recover.tau) return r->recover.pos(t);
    return 0.0;
  }

  double hip_acc(double t) const {
    const Rep* r = find(t);
    if (!r) return 0.0;
    if (t >= r->t_toe_off && t < r->t_land) return -constants_.g;
    if (t >= r->t_dip && t < r->dip.t0 + r->dip.tau) return r->dip.acc(t);
    if (t >= r->push.t0 && t < r->t_toe_off) return r->push.acc(t);
    if (t >= r->t_land && t < r->land.t0 + r->land.tau) return r->land.acc(t);
    if (t >= r->recover.t0 && t < r->recover.t0 + r->recover.tau) return r->recover.acc(t);
    return 0.0;
  }

  /// Toe displacement in metres relative to the ground.
  double toe_m(double t) const {
    const Rep* r = find(t);
    if (!r) return 0.0;
    if (t >= r->toe_join_in && t < r->toe_join_out) {
      const double dt = t - r->t_apex;
      const double h_m = spec_.true_height_cm / 100.0;
      return h_m - 0.5 * constants_.g * dt * dt;
    }
    if (t >= r->toe_pre.t0 && t < r->toe_join_in) return r->toe_pre.pos(t);
    if (t >= r->toe_join_out && t < r->toe_post.t0 + r->toe_post.tau) return r->toe_post.pos(t);
    return 0.0;
  }

  /// Vertical ground-reaction force in newtons; exactly zero during flight.
  double force_n(double t) const {
    if (in_flight(t)) return 0.0;
    const double mass = spec_.stance_force_n / constants_.g;
    return spec_.stance_force_n + mass * hip_acc(t);
  }

  bool in_flight(double t) const {
    const Rep* r = find(t);
    return r && t >= r->t_toe_off && t < r->t_land;
  }

  const SynthTruth& truth() const { return truth_; }
  const SynthJumpSpec& spec() const { return spec_; }

 private:
  struct Rep {
    double t_dip = 0.0, t_toe_off = 0.0, t_apex = 0.0, t_land = 0.0;
    double apex_y = 0.0;
    double toe_join_in = 0.0, toe_join_out = 0.0;
    detail::Quintic dip, push, land, recover, toe_pre, toe_post;
  };

  const Rep* find(double t) const {
    for (const Rep& r : reps_) {
      const double end = r.recover.t0 + r.recover.tau;
      if (t >= r.t_dip && t < end) return &r;
    }
    return nullptr;
  }

  SynthJumpSpec spec_;
  Constants constants_;
  SynthTruth truth_;
  std::vector<Rep> reps_;
};

struct SynthSession {
  KeypointRecording keypoints;
  MarkerRecording markers;
  ForceTrace force;
  SynthTruth truth;
};

/// Sample the trajectory into the three recording modalities, adding the
/// requested i.i.d. Gaussian noise. Deterministic for a fixed seed.
inline SynthSession generate(const SynthJumpSpec& spec) {
  const SynthTrajectory traj(spec);
  const SynthTruth& truth = traj.truth();
  const double duration = truth.duration_s;

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto noise = [&](double sd) { return sd > 0.0 ? sd * gauss(rng) : 0.0; };

  SynthSession session;
  session.truth = truth;

  // Keypoints: joints "hip" and "small_toe", image coordinates (y down).
  KeypointRecording& kp = session.keypoints;
  kp.fps = spec.fps;
  kp.image_height_px = spec.image_height_px;
  kp.joint_names = {"hip", "small_toe"};
  const auto n_frames = static_cast<std::size_t>(std::floor(duration * spec.fps));
  kp.frames.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    const double t = static_cast<double>(i) / spec.fps;
    KeypointFrame& f = kp.frames[i];
    f.index = static_cast<long>(i);
    f.joints.resize(2);
    const double hip_up_px =
        (traj.hip_m(t) * 1000.0 + spec.hip_stance_mm) / spec.scale_mm_per_px + noise(spec.noise_px_sd);
    const double toe_up_px =
        (traj.toe_m(t) * 1000.0 + spec.toe_stance_mm) / spec.scale_mm_per_px + noise(spec.noise_px_sd);
    f.joints[0] = {360.0 + noise(spec.noise_px_sd), spec.image_height_px - hip_up_px, 0.9};
    f.joints[1] = {380.0 + noise(spec.noise_px_sd), spec.image_height_px - toe_up_px, 0.9};
  }
  if (spec.spikes_per_series > 0) {
    std::uniform_int_distribution<std::size_t> pick(0, n_frames - 1);
    std::uniform_real_distribution<double> sign(-1.0, 1.0);
    for (int joint = 0; joint < 2; ++joint)
      for (int s = 0; s < spec.spikes_per_series; ++s) {
        const std::size_t at = pick(rng);
        kp.frames[at].joints[static_cast<std::size_t>(joint)].y_px +=
            sign(rng) < 0.0 ? -spec.spike_px : spec.spike_px;
      }
  }

  // Markers: exact positions, millimetres, z vertical.
  MarkerRecording& mk = session.markers;
  mk.rate_hz = spec.omc_rate_hz;
  mk.vertical_axis = 'z';
  mk.marker_order = {"hip", "toe"};
  const auto n_marker = static_cast<std::size_t>(std::floor(duration * spec.omc_rate_hz));
  MarkerSeries hip_series, toe_series;
  for (TimeSeries* ts : {&hip_series.x, &hip_series.y, &hip_series.z, &toe_series.x, &toe_series.y,
                         &toe_series.z}) {
    ts->rate_hz = spec.omc_rate_hz;
    ts->unit = Unit::Millimetres;
    ts->samples.reserve(n_marker);
  }
  for (std::size_t i = 0; i < n_marker; ++i) {
    const double t = static_cast<double>(i) / spec.omc_rate_hz;
    hip_series.x.samples.push_back(100.0);
    hip_series.y.samples.push_back(200.0);
    hip_series.z.samples.push_back(traj.hip_m(t) * 1000.0 + spec.hip_stance_mm);
    toe_series.x.samples.push_back(120.0);
    toe_series.y.samples.push_back(210.0);
    toe_series.z.samples.push_back(traj.toe_m(t) * 1000.0 + spec.toe_stance_mm);
  }
  mk.markers.emplace("hip", std::move(hip_series));
  mk.markers.emplace("toe", std::move(toe_series));

  // Force trace.
  ForceTrace& fp = session.force;
  fp.force.rate_hz = spec.fp_rate_hz;
  fp.force.unit = Unit::Newtons;
  const auto n_force = static_cast<std::size_t>(std::floor(duration * spec.fp_rate_hz));
  fp.force.samples.reserve(n_force);
  for (std::size_t i = 0; i < n_force; ++i) {
    const double t = static_cast<double>(i) / spec.fp_rate_hz;
    fp.force.samples.push_back(traj.force_n(t) + noise(spec.noise_n_sd));
  }

  return session;
}

}  // namespace jm
