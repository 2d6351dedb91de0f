#include "abrsim/controllers.hpp"

#include <algorithm>
#include <cmath>

namespace abrsim {

void ControllerContext::push_samples(double bandwidth_mbps, double latency_s) {
  bandwidth_window.push_back(bandwidth_mbps);
  latency_window.push_back(latency_s);
  while (bandwidth_window.size() > kWindowCapacity) bandwidth_window.pop_front();
  while (latency_window.size() > kWindowCapacity) latency_window.pop_front();
}

double rung_to_frac(int rung, int ladder_size) {
  if (ladder_size <= 1) return 0.0;
  return static_cast<double>(rung) / (ladder_size - 1);
}

double speed_to_frac(double speed) { return clamp01((speed - 0.9) / 0.2); }

namespace {

int highest_rung_under(const std::vector<Representation>& ladder, double budget_mbps) {
  int rung = 0;
  for (size_t i = 0; i < ladder.size(); ++i)
    if (ladder[i].bitrate_mbps() <= budget_mbps) rung = static_cast<int>(i);
  return rung;
}

struct WindowStats {
  double mean = 0.0;
  double std = 0.0;
};

WindowStats stats(const std::deque<double>& w) {
  WindowStats s;
  if (w.empty()) return s;
  for (double v : w) s.mean += v;
  s.mean /= static_cast<double>(w.size());
  double var = 0.0;
  for (double v : w) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / static_cast<double>(w.size()));
  return s;
}

}  // namespace

Action FixedRungController::decide(const ControllerContext& ctx) {
  const int top = std::max(ctx.ladder_size() - 1, 0);
  const int rung = rung_ < 0 ? top : std::min(rung_, top);
  return Action(rung_to_frac(rung, ctx.ladder_size()), speed_to_frac(1.0));
}

Action throughput_rule(const ControllerContext& ctx, double safety) {
  if (!ctx.ladder || ctx.ladder->empty())
    throw ValidationError("throughput_rule: missing ladder");
  const int rung = highest_rung_under(*ctx.ladder, safety * ctx.predicted_bw_mbps);
  double speed = 1.0;
  if (ctx.raw.latency_s > 1.2 * ctx.latency_target_s)
    speed = 1.1;
  else if (ctx.raw.buffer_s < 0.5)
    speed = 0.9;
  return Action(rung_to_frac(rung, ctx.ladder_size()), speed_to_frac(speed));
}

Action mean_std_heuristic(const ControllerContext& ctx, double f) {
  if (!ctx.ladder || ctx.ladder->empty())
    throw ValidationError("mean_std_heuristic: missing ladder");
  if (ctx.bandwidth_window.empty())
    throw ValidationError("mean_std_heuristic: no bandwidth samples");
  const WindowStats bw = stats(ctx.bandwidth_window);
  const double estimate = bw.mean - f * bw.std;
  const int rung = highest_rung_under(*ctx.ladder, estimate);
  double speed = 1.0;
  if (!ctx.latency_window.empty()) {
    const WindowStats lat = stats(ctx.latency_window);
    if (lat.mean + f * lat.std > ctx.latency_target_s) speed = 1.1;
  }
  return Action(rung_to_frac(rung, ctx.ladder_size()), speed_to_frac(speed));
}

Action ThroughputRuleController::decide(const ControllerContext& ctx) {
  return throughput_rule(ctx, safety_);
}

Action MeanStdController::decide(const ControllerContext& ctx) {
  return mean_std_heuristic(ctx, f_);
}

namespace {
SacControllerFactory g_sac_factory = nullptr;
}

void register_sac_controller_factory(SacControllerFactory factory) { g_sac_factory = factory; }

std::unique_ptr<Controller> make_controller(const std::string& spec) {
  if (spec == "rule") return std::make_unique<ThroughputRuleController>();
  if (spec == "meanstd") return std::make_unique<MeanStdController>();
  if (spec.rfind("fixed:", 0) == 0) {
    const std::string arg = spec.substr(6);
    if (arg == "max") return std::make_unique<FixedRungController>(-1);
    try {
      const int rung = std::stoi(arg);
      if (rung < 0) throw ValidationError("bad fixed rung spec: " + spec);
      return std::make_unique<FixedRungController>(rung);
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception&) {
      throw ValidationError("bad fixed rung spec: " + spec);
    }
  }
  if (spec.rfind("sac:", 0) == 0) {
    if (!g_sac_factory) throw ValidationError("sac controller factory not registered");
    return g_sac_factory(spec.substr(4));
  }
  throw ValidationError("unknown controller spec: " + spec);
}

}  // namespace abrsim
