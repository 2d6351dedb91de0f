#pragma once

#include <utility>
#include <vector>

#include "abrsim/common.hpp"
#include "abrsim/manifest.hpp"

namespace abrsim {

/// Data-acquisition energy coefficients: per-chunk cost is
/// alpha_net / throughput + beta_net * size.
struct EnergyCoefficients {
  double alpha_net = 1.0;  // joule * Mbps
  double beta_net = 0.1;   // joules per megabit

  void validate() const {
    if (alpha_net < 0.0 || beta_net < 0.0)
      throw ValidationError("energy coefficients must be non-negative");
  }
};

/// Local playback (decode + render + display) linear model, per second:
/// c0 + c1 * bitrate_Mbps + c2 * megapixels + c3 * fps/30.
struct PlaybackCoefficients {
  double c0 = 0.8;   // J/s base
  double c1 = 0.3;   // J/s per Mbps
  double c2 = 0.05;  // J/s per megapixel
  double c3 = 0.1;   // J/s per 30 fps

  void validate() const {
    if (c0 < 0.0 || c1 < 0.0 || c2 < 0.0 || c3 < 0.0)
      throw ValidationError("playback coefficients must be non-negative");
  }
};

/// Per-chunk (predicted throughput Mbps, size Mb) pairs.
using ChunkEnergyInput = std::vector<std::pair<double, double>>;

double data_energy_j(const ChunkEnergyInput& chunks, const EnergyCoefficients& c);

double playback_energy_j(const Representation& rep, double duration_s,
                         const PlaybackCoefficients& c);

inline double segment_energy_j(double data_j, double playback_j) {
  if (data_j < 0.0 || playback_j < 0.0)
    throw ValidationError("segment_energy: negative component");
  return data_j + playback_j;
}

}  // namespace abrsim
