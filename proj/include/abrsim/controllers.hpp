#pragma once

#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "abrsim/manifest.hpp"
#include "abrsim/types.hpp"

namespace abrsim {

/// Everything a controller may look at when deciding the next segment's
/// action. Windows hold the most recent samples, newest last.
struct ControllerContext {
  RawFeatures raw;
  Observation normalized = Observation::Zero();
  double predicted_bw_mbps = 0.0;
  const std::vector<Representation>* ladder = nullptr;
  double latency_target_s = 2.0;
  std::deque<double> bandwidth_window;  // measured throughput, Mbps
  std::deque<double> latency_window;    // seconds

  static constexpr size_t kWindowCapacity = 10;
  void push_samples(double bandwidth_mbps, double latency_s);
  int ladder_size() const { return ladder ? static_cast<int>(ladder->size()) : 0; }
};

class Controller {
 public:
  virtual ~Controller() = default;
  virtual Action decide(const ControllerContext& ctx) = 0;
  virtual std::string name() const = 0;
};

/// Always requests the given rung at default speed; -1 means the top rung.
class FixedRungController : public Controller {
 public:
  explicit FixedRungController(int rung) : rung_(rung) {}
  Action decide(const ControllerContext& ctx) override;
  std::string name() const override {
    return rung_ < 0 ? "fixed:max" : "fixed:" + std::to_string(rung_);
  }

 private:
  int rung_;
};

/// Highest rung whose bitrate fits under safety * predicted bandwidth;
/// speeds up on high latency, slows down on a thin buffer.
class ThroughputRuleController : public Controller {
 public:
  explicit ThroughputRuleController(double safety = 0.9) : safety_(safety) {}
  Action decide(const ControllerContext& ctx) override;
  std::string name() const override { return "rule"; }

 private:
  double safety_;
};

/// Conservative mean-minus-std bandwidth estimate with a latency-window
/// speed rule.
class MeanStdController : public Controller {
 public:
  explicit MeanStdController(double f = 1.0) : f_(f) {}
  Action decide(const ControllerContext& ctx) override;
  std::string name() const override { return "meanstd"; }

 private:
  double f_;
};

Action throughput_rule(const ControllerContext& ctx, double safety = 0.9);
Action mean_std_heuristic(const ControllerContext& ctx, double f = 1.0);

/// Convert a rung index into the action fraction that maps back onto it.
double rung_to_frac(int rung, int ladder_size);
/// Convert a playback speed in [0.9, 1.1] into its action fraction.
double speed_to_frac(double speed);

/// Parse "fixed:<rung> | rule | meanstd | sac:<checkpoint path>".
/// The SAC wrapper is registered by the sac module at startup.
std::unique_ptr<Controller> make_controller(const std::string& spec);

/// Hook used by the sac module to provide "sac:<path>" construction
/// without a dependency cycle.
using SacControllerFactory = std::unique_ptr<Controller> (*)(const std::string& checkpoint_path);
void register_sac_controller_factory(SacControllerFactory factory);

}  // namespace abrsim
