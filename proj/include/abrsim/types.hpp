#pragma once

#include <Eigen/Dense>

#include "abrsim/common.hpp"

namespace abrsim {

constexpr int kObservationDim = 10;

/// Normalized state vector handed to controllers and the learner.
/// Component order: buffer, latency, stall, speed, bitrate, vmaf,
/// vmaf smoothness, predicted bandwidth, data energy, playback energy.
using Observation = Eigen::Matrix<double, kObservationDim, 1>;

/// Two-dimensional continuous action; both components live in [0, 1]
/// and are clamped on entry.
struct Action {
  double bitrate_frac = 0.0;
  double speed_frac = 0.5;

  Action() = default;
  Action(double bitrate, double speed)
      : bitrate_frac(clamp01(bitrate)), speed_frac(clamp01(speed)) {}
};

/// Raw (un-normalized) per-step features mirroring the Observation layout.
struct RawFeatures {
  double buffer_s = 0.0;
  double latency_s = 0.0;
  double stall_s = 0.0;
  double speed = 1.0;
  double bitrate_kbps = 0.0;
  double vmaf = 0.0;
  double vmaf_delta = 0.0;
  double predicted_bw_mbps = 0.0;
  double data_energy_j = 0.0;
  double playback_energy_j = 0.0;
};

/// Everything the reward and session metrics need about one finished segment.
struct StepOutcome {
  int segment_index = 0;
  int rung = 0;
  double bitrate_kbps = 0.0;
  double vmaf = 0.0;
  double vmaf_prev = 0.0;
  double stall_duration_s = 0.0;
  bool stall_event = false;
  double latency_s = 0.0;  // at segment download completion
  double speed = 1.0;
  double predicted_bw_mbps = 0.0;
  double data_energy_j = 0.0;
  double playback_energy_j = 0.0;
  double downloaded_mb = 0.0;

  double total_energy_j() const { return data_energy_j + playback_energy_j; }
};

}  // namespace abrsim
