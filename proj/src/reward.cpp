#include "abrsim/reward.hpp"

#include <algorithm>
#include <cmath>

namespace abrsim {

void RewardWeights::validate() const {
  for (double k : {k1, k2, k3, k4, k5, k6, k7})
    if (k < 0.0) throw ValidationError("reward weights must be non-negative");
  if (!(energy_ref_j > 0.0) || !(latency_ref_s > 0.0) || !(stall_cap_s > 0.0) ||
      !(speed_band > 0.0) || !(vmaf_scale > 0.0))
    throw ValidationError("reward normalizer references must be positive");
}

double step_reward(const StepOutcome& o, const RewardWeights& w) {
  const double g1 = o.vmaf / w.vmaf_scale;
  const double g2 = o.total_energy_j() / w.energy_ref_j;
  const double g3 = o.stall_event ? 1.0 : 0.0;
  const double g4 = std::min(o.stall_duration_s, w.stall_cap_s) / w.stall_cap_s;
  const double g5 = std::min(o.latency_s / w.latency_ref_s, 5.0) / 5.0;
  const double g6 = std::abs(1.0 - o.speed) / w.speed_band;
  const double g7 = std::abs(o.vmaf - o.vmaf_prev) / w.vmaf_scale;
  return w.k1 * g1 / (1.0 + w.k2 * g2) - w.k3 * g3 - w.k4 * g4 - w.k5 * g5 - w.k6 * g6 -
         w.k7 * g7;
}

double session_qoe(std::span<const StepOutcome> outcomes, const QoECoefficients& c) {
  if (outcomes.empty()) throw ValidationError("session_qoe: empty outcome list");
  const double T = static_cast<double>(outcomes.size());
  double quality = 0.0, stall_s = 0.0, latency = 0.0, speed_dev = 0.0, smooth = 0.0;
  int stall_events = 0;
  for (size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    quality += o.vmaf / 20.0;
    stall_s += o.stall_duration_s;
    if (o.stall_event) ++stall_events;
    latency += o.latency_s;
    speed_dev += std::abs(1.0 - o.speed);
    if (i >= 1) smooth += std::abs(o.vmaf - outcomes[i - 1].vmaf) / 20.0;
  }
  return c.alpha * quality - c.beta * stall_s - c.gamma * stall_events - c.sigma * latency / T -
         c.mu * speed_dev - c.omega * smooth;
}

double energy_efficiency(double qoe, double total_energy_kj, double e_ref_kj) {
  if (!(total_energy_kj > 0.0))
    throw ValidationError("energy_efficiency: total energy must be positive");
  return qoe / (total_energy_kj / e_ref_kj);
}

SessionSummary summarize(std::span<const StepOutcome> outcomes, const QoECoefficients& c) {
  if (outcomes.empty()) throw ValidationError("summarize: empty outcome list");
  SessionSummary s;
  s.segments = static_cast<int>(outcomes.size());
  double energy_j = 0.0;
  for (size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    s.quality_level += o.vmaf / 20.0;
    if (i >= 1) s.smoothness += std::abs(o.vmaf - outcomes[i - 1].vmaf);
    s.data_dl_mb += o.downloaded_mb;
    s.mean_bitrate_mbps += o.bitrate_kbps / 1000.0;
    s.mean_latency_s += o.latency_s;
    s.mean_speed += o.speed;
    s.freezing_s += o.stall_duration_s;
    if (o.stall_event) ++s.freezing_events;
    energy_j += o.total_energy_j();
  }
  const double T = static_cast<double>(s.segments);
  s.quality_level /= T;
  s.mean_bitrate_mbps /= T;
  s.mean_latency_s /= T;
  s.mean_speed /= T;
  s.energy_kj = energy_j / 1000.0;
  s.qoe = session_qoe(outcomes, c);
  s.energy_efficiency = energy_efficiency(s.qoe, s.energy_kj);
  return s;
}

double RewardStandardizer::push(double reward) {
  ++count_;
  const double delta = reward - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (reward - mean_);
  const double sd = stddev();
  return (reward - mean_) / (sd > 1e-6 ? sd : 1e-6);
}

double RewardStandardizer::stddev() const {
  if (count_ < 2) return 0.0;
  return std::sqrt(m2_ / static_cast<double>(count_));
}

}  // namespace abrsim
