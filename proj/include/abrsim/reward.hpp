#pragma once

#include <span>
#include <vector>

#include "abrsim/types.hpp"

namespace abrsim {

/// Weights and fixed normalizer references for the per-step reward.
/// Each g_i maps its raw input to [0, 1] so the k_i stay comparable.
struct RewardWeights {
  double k1 = 2.0;  // quality
  double k2 = 0.5;  // energy (denominator)
  double k3 = 0.5;  // stall event
  double k4 = 1.0;  // stall duration
  double k5 = 0.3;  // latency
  double k6 = 0.2;  // speed deviation
  double k7 = 1.0;  // quality smoothness

  double vmaf_scale = 100.0;
  double energy_ref_j = 2.0;
  double latency_ref_s = 2.0;
  double stall_cap_s = 4.0;
  double speed_band = 0.1;

  void validate() const;
};

/// Session-level QoE coefficients.
struct QoECoefficients {
  double alpha = 0.077;
  double beta = 1.249;
  double gamma = 2.897;
  double sigma = 1.249;
  double mu = 0.771;
  double omega = 1.436;
};

/// r = k1*g1 / (1 + k2*g2) - k3*g3 - k4*g4 - k5*g5 - k6*g6 - k7*g7.
double step_reward(const StepOutcome& o, const RewardWeights& w);

/// QoE = alpha*sum(vmaf/20) - beta*sum(stall_s) - gamma*stall_events
///       - sigma*mean(latency) - mu*sum|1 - speed|
///       - omega*sum_{t>=2}|vmaf_t - vmaf_{t-1}|/20.
double session_qoe(std::span<const StepOutcome> outcomes, const QoECoefficients& c);

/// QoE per unit of (energy / reference energy); reference defaults to 1 kJ.
double energy_efficiency(double qoe, double total_energy_kj, double e_ref_kj = 1.0);

struct SessionSummary {
  int segments = 0;
  double quality_level = 0.0;      // mean(vmaf / 20), 0..5
  double smoothness = 0.0;         // sum |delta vmaf|
  double data_dl_mb = 0.0;
  double mean_bitrate_mbps = 0.0;
  double mean_latency_s = 0.0;
  double mean_speed = 0.0;
  double freezing_s = 0.0;
  int freezing_events = 0;
  double energy_kj = 0.0;
  double qoe = 0.0;
  double energy_efficiency = 0.0;
};

SessionSummary summarize(std::span<const StepOutcome> outcomes, const QoECoefficients& c);

/// Running mean/std reward standardizer used only inside the trainer;
/// reported QoE and logged episode rewards stay raw.
class RewardStandardizer {
 public:
  double push(double reward);  // returns the standardized value
  long count() const { return count_; }
  double mean() const { return mean_; }
  double stddev() const;

 private:
  long count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace abrsim
