#pragma once

#include <string>

#include "abrsim/energy.hpp"
#include "abrsim/reward.hpp"
#include "abrsim/sac.hpp"
#include "abrsim/sim.hpp"

namespace abrsim {

/// Flat, typed key=value run configuration. Every knob has a default; a
/// config file overrides defaults and CLI flags override the file. echo()
/// emits the complete effective configuration so a run can be reproduced
/// from its output directory alone.
struct RunConfig {
  std::uint64_t seed = 42;
  std::string traces_dir;
  std::string manifest_path;
  std::string out_dir = "out";
  std::string checkpoint_path;
  std::string abr = "rule";
  int jobs = 1;

  SessionConfig session;
  PredictorConfig predictor;
  RewardWeights reward;
  QoECoefficients qoe;
  EnergyCoefficients energy;
  PlaybackCoefficients playback;
  sac::SacConfig sac;

  /// Set one key; throws ValidationError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);

  /// Parse "key = value" lines ('#' starts a comment).
  static RunConfig from_file(const std::string& path);
  static RunConfig from_text(const std::string& text);

  std::string echo() const;
  void write_echo(const std::string& path) const;

  void validate() const;
};

}  // namespace abrsim
