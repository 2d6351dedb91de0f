#include "abrsim/energy.hpp"

namespace abrsim {

double data_energy_j(const ChunkEnergyInput& chunks, const EnergyCoefficients& c) {
  double total = 0.0;
  for (const auto& [th_mbps, size_mb] : chunks) {
    if (!(th_mbps > 0.0))
      throw ValidationError("data_energy: non-positive predicted throughput");
    total += c.alpha_net / th_mbps + c.beta_net * size_mb;
  }
  return total;
}

double playback_energy_j(const Representation& rep, double duration_s,
                         const PlaybackCoefficients& c) {
  if (duration_s < 0.0) throw ValidationError("playback_energy: negative duration");
  const double per_second =
      c.c0 + c.c1 * rep.bitrate_mbps() + c.c2 * rep.megapixels() + c.c3 * rep.fps / 30.0;
  return duration_s * per_second;
}

}  // namespace abrsim
