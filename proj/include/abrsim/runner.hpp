#pragma once

#include <vector>

#include "abrsim/controllers.hpp"
#include "abrsim/sim.hpp"

namespace abrsim {

struct SessionResult {
  std::vector<StepOutcome> outcomes;
  std::vector<double> rewards;
  std::vector<double> buffers_s;     // buffer level at each segment completion
  std::vector<double> wall_times_s;  // wall clock at each segment completion
  SessionSummary summary;
  PlayerState final_player;
};

/// Drive one full session with the given controller, feeding it a context
/// refreshed at every segment boundary.
SessionResult run_session(const SessionConfig& config,
                          std::shared_ptr<const NetworkTrace> trace,
                          std::shared_ptr<const VideoManifest> manifest, Controller& controller,
                          const RewardWeights& reward_weights, const QoECoefficients& qoe,
                          const EnergyCoefficients& energy, const PlaybackCoefficients& playback,
                          const PredictorConfig& predictor = {});

}  // namespace abrsim
