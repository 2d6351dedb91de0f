#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abrsim/common.hpp"

namespace abrsim {

/// One rung of a bitrate ladder.
struct Representation {
  int bitrate_kbps = 0;
  int width = 0;
  int height = 0;
  double fps = 30.0;

  double bitrate_mbps() const { return bitrate_kbps / 1000.0; }
  double megapixels() const { return width * static_cast<double>(height) / 1e6; }
};

/// Per-title ladder with per-segment chunk sizes (megabits) and VMAF per rung.
struct VideoManifest {
  struct RungData {
    std::vector<double> chunk_sizes_mb;  // one entry per chunk
    double vmaf = 0.0;                   // 0..100
  };

  std::string title;
  double segment_duration_s = 1.0;
  int chunks_per_segment = 5;
  std::vector<Representation> ladder;           // ascending bitrate
  std::vector<std::vector<RungData>> segments;  // [segment][rung]

  int num_segments() const { return static_cast<int>(segments.size()); }
  int num_rungs() const { return static_cast<int>(ladder.size()); }
  double chunk_duration_s() const { return segment_duration_s / chunks_per_segment; }
  int min_bitrate_kbps() const { return ladder.front().bitrate_kbps; }
  int max_bitrate_kbps() const { return ladder.back().bitrate_kbps; }

  void validate() const;  // throws ValidationError
};

double vmaf_of(const VideoManifest& m, int segment_index, int rung_index);
const VideoManifest::RungData& segment_rung(const VideoManifest& m, int segment_index,
                                            int rung_index);

/// Table-driven ladders for the three content genres.
std::vector<Representation> genre_ladder(const std::string& genre);

/// Saturating quality curve: vmaf(bitrate) = 100 * (1 - exp(-b / b_c)),
/// with the half-life constant b_c dependent on content complexity.
double synthetic_vmaf(const std::string& genre, double bitrate_mbps);

/// Build a manifest for a genre with lognormal chunk-size variability
/// (sigma 0.15, mean preserved) and jittered, rung-monotone VMAF.
VideoManifest generate_manifest(const std::string& genre, int n_segments, std::uint64_t seed);

VideoManifest load_manifest(const std::string& path);
void save_manifest(const VideoManifest& m, const std::string& path);

}  // namespace abrsim
