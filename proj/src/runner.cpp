#include "abrsim/runner.hpp"

namespace abrsim {

namespace {

void record_step(SessionResult& result, ControllerContext& ctx, const LiveSession& env,
                 const StepResult& sr) {
  result.outcomes.push_back(sr.outcome);
  result.rewards.push_back(sr.reward);
  result.buffers_s.push_back(sr.raw.buffer_s);
  result.wall_times_s.push_back(env.player().wall_clock_s);
  ctx.raw = sr.raw;
  ctx.normalized = sr.obs;
  ctx.predicted_bw_mbps = sr.outcome.predicted_bw_mbps;
  ctx.push_samples(env.measured_bandwidth_mbps(), sr.outcome.latency_s);
}

}  // namespace

SessionResult run_session(const SessionConfig& config,
                          std::shared_ptr<const NetworkTrace> trace,
                          std::shared_ptr<const VideoManifest> manifest, Controller& controller,
                          const RewardWeights& reward_weights, const QoECoefficients& qoe,
                          const EnergyCoefficients& energy, const PlaybackCoefficients& playback,
                          const PredictorConfig& predictor) {
  LiveSession env(config, std::move(trace), std::move(manifest), reward_weights, energy,
                  playback, predictor);
  SessionResult result;
  result.outcomes.reserve(config.session_segments);
  result.rewards.reserve(config.session_segments);

  ControllerContext ctx;
  ctx.ladder = &env.manifest().ladder;
  ctx.latency_target_s = config.latency_reference_s;

  record_step(result, ctx, env, env.reset());
  while (!env.done()) record_step(result, ctx, env, env.step(controller.decide(ctx)));

  result.summary = summarize(result.outcomes, qoe);
  result.final_player = env.player();
  return result;
}

}  // namespace abrsim
