#pragma once

#include <memory>
#include <string>
#include <vector>

#include "abrsim/sac.hpp"
#include "abrsim/sim.hpp"

namespace abrsim::sac {

/// One worker's environment recipe: session geometry plus the trace pool
/// its episodes rotate through.
struct WorkerEnvSpec {
  SessionConfig session;
  RewardWeights reward_weights;
  EnergyCoefficients energy;
  PlaybackCoefficients playback;
  PredictorConfig predictor;
  std::shared_ptr<const VideoManifest> manifest;
  std::vector<std::shared_ptr<const NetworkTrace>> traces;
};

struct EpisodeLogRow {
  int episode = 0;
  int worker = 0;
  long env_steps = 0;         // cumulative env steps when the episode ended
  double mean_reward = 0.0;   // raw (un-standardized) per-step mean
  double critic_loss = 0.0;   // latest update stats at episode end
  double actor_objective = 0.0;
  double entropy = 0.0;
};

struct TrainResult {
  PolicyParams params;
  std::vector<EpisodeLogRow> log;
  long total_env_steps = 0;
  long total_updates = 0;
  double wall_seconds = 0.0;
  std::string checkpoint_path;  // empty when no out_dir was given
};

/// Algorithm: W actor workers fill a shared prioritized buffer from their
/// own environments while a single learner performs the SAC update block
/// at a fixed updates-per-env-step cadence. Workers act on parameter
/// snapshots refreshed every sync_interval env steps. W=1 runs fully
/// sequentially and is bit-reproducible for a fixed seed.
///
/// When out_dir is non-empty, writes checkpoint.json and training_log.csv.
TrainResult train(const SacConfig& cfg, const std::vector<WorkerEnvSpec>& worker_specs,
                  const std::string& out_dir = "");

/// Split traces into `workers` pools by ascending mean bandwidth, so each
/// worker sees a distinct network level.
std::vector<std::vector<std::shared_ptr<const NetworkTrace>>> partition_traces(
    const std::vector<std::shared_ptr<const NetworkTrace>>& traces, int workers);

void write_training_log_csv(const std::string& path, const std::vector<EpisodeLogRow>& log);

}  // namespace abrsim::sac
