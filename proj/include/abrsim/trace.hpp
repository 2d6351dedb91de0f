#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abrsim/common.hpp"

namespace abrsim {

/// Timestamped bandwidth series driving chunk downloads.
/// Times are strictly increasing and start at 0; bandwidth is in Mbps
/// (megabits per second, so numerically equal to Mb per second).
struct NetworkTrace {
  struct Sample {
    double time_s = 0.0;
    double bandwidth_mbps = 0.0;
  };

  std::vector<Sample> samples;
  double duration_s = 0.0;
  std::string label;

  void validate() const;  // throws ValidationError
  double mean_bandwidth_mbps() const;
};

struct TraceGenSpec {
  double mean_bw_mbps = 3.07;
  double fluctuation = 0.5;  // std of the per-step log-bandwidth innovation
  double step_period_s = 1.0;
  double min_bw_mbps = 0.15;
  double duration_s = 320.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Step interpolation: value of the latest sample at or before t.
/// With wrap enabled, t beyond the duration folds back modulo duration.
double bandwidth_at(const NetworkTrace& trace, double t_s, bool wrap);

/// Wall time until which a piecewise-constant stretch of the trace holds,
/// starting from t. Used to integrate downloads exactly across samples.
double next_bandwidth_change(const NetworkTrace& trace, double t_s, bool wrap);

/// CSV rows "time_s,bandwidth_mbps"; an optional "#duration=<s>" comment
/// pins the duration, otherwise it extends past the last sample by the
/// last inter-sample gap.
NetworkTrace load_network_trace(const std::string& path);
NetworkTrace parse_network_trace(const std::string& text, const std::string& label);
void save_network_trace(const NetworkTrace& trace, const std::string& path);

/// Bounded multiplicative random walk: every step_period the level is
/// multiplied by exp(N(0, fluctuation)) and clamped to
/// [min_bw, 4 * mean_bw]. Deterministic for a fixed seed.
NetworkTrace generate_synthetic_trace(const TraceGenSpec& spec);

/// Named generator presets for the five trace families used throughout
/// (3g, lte, 4g, 5g, synthetic) plus their mixing weights.
TraceGenSpec trace_preset(const std::string& name);
const std::vector<std::string>& trace_preset_names();
const std::vector<double>& trace_preset_weights();

}  // namespace abrsim
