#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "abrsim/bandwidth.hpp"
#include "abrsim/energy.hpp"
#include "abrsim/manifest.hpp"
#include "abrsim/reward.hpp"
#include "abrsim/trace.hpp"
#include "abrsim/types.hpp"

namespace abrsim {

struct SessionConfig {
  double segment_duration_s = 1.0;
  int chunks_per_segment = 5;
  int session_segments = 300;
  double startup_buffer_s = 0.6;
  double resume_buffer_s = 0.4;
  double latency_reference_s = 2.0;
  bool trace_wrap = true;
  std::uint64_t seed = 0;

  double chunk_duration_s() const { return segment_duration_s / chunks_per_segment; }
  void validate() const;
};

struct PredictorConfig {
  int window = 10;
  double idle_discard_frac = 0.1;
  int rls_order = 5;
  double rls_forgetting = 0.999;
  double rls_delta = 0.01;
};

struct PlayerState {
  double wall_clock_s = 0.0;
  double playhead_s = 0.0;
  double buffer_s = 0.0;
  double latency_s = 0.0;
  double speed = 1.0;
  bool stalled = false;
  bool playback_started = false;
  double playback_start_wall_s = 0.0;
  double total_stall_s = 0.0;
  int stall_events = 0;
  double total_downloaded_mb = 0.0;
  double total_energy_j = 0.0;
};

/// round(frac * (L - 1)) with half-up ties; frac is clamped to [0, 1].
int map_bitrate(double frac, int ladder_size);

/// 0.90 + 0.20 * frac.
double map_speed(double frac);

/// Fixed-range min-max normalization of the raw features, clipped to [0, 1].
Observation normalize(const RawFeatures& f, double ladder_min_kbps, double ladder_max_kbps);

struct StepResult {
  RawFeatures raw;
  Observation obs = Observation::Zero();
  StepOutcome outcome;
  double reward = 0.0;
  bool done = false;
};

/// One live streaming session: the source produces chunk_duration-sized
/// chunks in real time, the client downloads them sequentially through the
/// trace, and a fluid playhead consumes buffered media.
///
/// Timing model:
///  - chunk j of segment t becomes available at t*segment_duration +
///    chunk_duration*(j+1) (production completion);
///  - playback begins at the first chunk completion where the buffered
///    media strictly exceeds startup_buffer, and resumes from a stall once
///    it strictly exceeds resume_buffer;
///  - each segment's media plays at the speed chosen with its download, so
///    wall time decomposes exactly into startup delay + sum(duration/speed)
///    + total stall time once the episode drains the remaining buffer.
class LiveSession {
 public:
  LiveSession(SessionConfig config, std::shared_ptr<const NetworkTrace> trace,
              std::shared_ptr<const VideoManifest> manifest, RewardWeights reward_weights,
              EnergyCoefficients energy, PlaybackCoefficients playback,
              PredictorConfig predictor = {});

  /// Starts the episode: downloads segment 0 at the lowest rung, speed 1.0.
  StepResult reset();

  /// Downloads the next segment under the mapped action, advances playback,
  /// and reports the segment outcome, reward, and next observation.
  StepResult step(const Action& action);

  bool done() const { return done_; }
  int next_segment() const { return next_segment_; }
  const VideoManifest& manifest() const { return *manifest_; }
  const SessionConfig& config() const { return config_; }

  PlayerState player() const;
  double measured_bandwidth_mbps() const;
  double predicted_bandwidth_mbps() const;

  /// Speeds at which each segment's media was / will be consumed.
  const std::vector<double>& media_speeds() const { return media_speeds_; }

 private:
  StepResult run_segment(int segment, int rung, double speed);
  void advance_playback(double to_wall);
  void drain_remaining_media();
  void on_chunk_downloaded();
  double advance_download(double start_wall, double size_mb) const;
  double buffered_edge() const { return chunks_downloaded_ * config_.chunk_duration_s(); }
  double buffer_level() const { return buffered_edge() - playhead_; }
  double latency() const { return wall_ - playhead_; }
  int media_segment_at(double playhead) const;

  SessionConfig config_;
  std::shared_ptr<const NetworkTrace> trace_;
  std::shared_ptr<const VideoManifest> manifest_;
  RewardWeights reward_weights_;
  EnergyCoefficients energy_;
  PlaybackCoefficients playback_;
  PredictorConfig predictor_cfg_;

  SlidingWindowEstimator estimator_;
  RlsFilter rls_;

  double wall_ = 0.0;
  double playhead_ = 0.0;
  long chunks_downloaded_ = 0;
  bool playback_started_ = false;
  bool stalled_ = false;
  double playback_start_wall_ = 0.0;
  double total_stall_s_ = 0.0;
  int stall_events_ = 0;
  double total_downloaded_mb_ = 0.0;
  double total_energy_j_ = 0.0;
  double last_chunk_throughput_mbps_ = 0.0;

  // Per-step accumulators.
  double step_stall_s_ = 0.0;
  bool step_stall_event_ = false;

  int next_segment_ = 0;
  bool started_ = false;
  bool done_ = false;
  double vmaf_prev_ = 0.0;
  std::vector<double> media_speeds_;
};

}  // namespace abrsim
