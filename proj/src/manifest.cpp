#include "abrsim/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace abrsim {

void VideoManifest::validate() const {
  if (ladder.empty()) throw ValidationError("manifest '" + title + "': empty ladder");
  if (segment_duration_s <= 0.0) throw ValidationError("manifest: segment duration must be > 0");
  if (chunks_per_segment < 1) throw ValidationError("manifest: chunks_per_segment must be >= 1");
  for (size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i].bitrate_kbps <= 0) throw ValidationError("manifest: non-positive bitrate in ladder");
    if (i > 0 && ladder[i].bitrate_kbps <= ladder[i - 1].bitrate_kbps)
      throw ValidationError("manifest: ladder bitrates must be strictly ascending");
  }
  for (size_t seg = 0; seg < segments.size(); ++seg) {
    if (segments[seg].size() != ladder.size())
      throw ValidationError("manifest: segment " + std::to_string(seg) + " rung count mismatch");
    double prev_vmaf = -1.0;
    for (size_t r = 0; r < segments[seg].size(); ++r) {
      const auto& rd = segments[seg][r];
      if (static_cast<int>(rd.chunk_sizes_mb.size()) != chunks_per_segment)
        throw ValidationError("manifest: segment " + std::to_string(seg) + " rung " +
                              std::to_string(r) + " chunk count mismatch");
      for (double sz : rd.chunk_sizes_mb)
        if (!(sz > 0.0)) throw ValidationError("manifest: non-positive chunk size");
      if (rd.vmaf < 0.0 || rd.vmaf > 100.0)
        throw ValidationError("manifest: vmaf out of [0,100]");
      if (rd.vmaf < prev_vmaf)
        throw ValidationError("manifest: vmaf decreasing in rung index at segment " +
                              std::to_string(seg));
      prev_vmaf = rd.vmaf;
    }
  }
}

const VideoManifest::RungData& segment_rung(const VideoManifest& m, int segment_index,
                                            int rung_index) {
  if (segment_index < 0 || segment_index >= m.num_segments())
    throw ValidationError("segment index out of range: " + std::to_string(segment_index));
  if (rung_index < 0 || rung_index >= m.num_rungs())
    throw ValidationError("rung index out of range: " + std::to_string(rung_index));
  return m.segments[segment_index][rung_index];
}

double vmaf_of(const VideoManifest& m, int segment_index, int rung_index) {
  return segment_rung(m, segment_index, rung_index).vmaf;
}

namespace {

struct Resolution {
  int w, h;
};

// Resolution column shared by all three genres.
const Resolution kResolutions[11] = {
    {256, 144},  {640, 360},  {640, 360},  {854, 480},   {854, 480},  {1280, 720},
    {1280, 720}, {1920, 1080}, {1920, 1080}, {2560, 1440}, {2560, 1440}};

const int kAnimationKbps[11] = {300, 450, 600, 800, 1400, 1900, 2400, 3500, 4700, 5000, 8000};
const int kMovieKbps[11] = {375, 560, 750, 1050, 1750, 2350, 3000, 4300, 5800, 8000, 10000};
const int kSportsKbps[11] = {450, 670, 900, 1250, 2100, 2800, 3600, 5200, 7000, 9000, 12000};

double vmaf_halflife_mbps(const std::string& genre) {
  if (genre == "animation") return 1.2;
  if (genre == "movie") return 1.8;
  if (genre == "sports") return 2.4;
  throw ValidationError("unknown genre: " + genre);
}

}  // namespace

std::vector<Representation> genre_ladder(const std::string& genre) {
  const int* kbps = nullptr;
  if (genre == "animation")
    kbps = kAnimationKbps;
  else if (genre == "movie")
    kbps = kMovieKbps;
  else if (genre == "sports")
    kbps = kSportsKbps;
  else
    throw ValidationError("unknown genre: " + genre);

  std::vector<Representation> ladder(11);
  for (int i = 0; i < 11; ++i)
    ladder[i] = Representation{kbps[i], kResolutions[i].w, kResolutions[i].h, 30.0};
  return ladder;
}

double synthetic_vmaf(const std::string& genre, double bitrate_mbps) {
  const double bc = vmaf_halflife_mbps(genre);
  return 100.0 * (1.0 - std::exp(-bitrate_mbps / bc));
}

VideoManifest generate_manifest(const std::string& genre, int n_segments, std::uint64_t seed) {
  if (n_segments < 1) throw ValidationError("generate_manifest: n_segments must be >= 1");
  VideoManifest m;
  m.title = genre;
  m.segment_duration_s = 1.0;
  m.chunks_per_segment = 5;
  m.ladder = genre_ladder(genre);

  Rng rng(seed);
  const double sigma = 0.15;
  // exp(N(-sigma^2/2, sigma)) has unit mean, so average chunk size stays
  // at bitrate * chunk_duration.
  const double log_shift = -0.5 * sigma * sigma;
  const double chunk_s = m.chunk_duration_s();

  m.segments.resize(n_segments);
  for (int seg = 0; seg < n_segments; ++seg) {
    auto& rungs = m.segments[seg];
    rungs.resize(m.ladder.size());
    double prev_vmaf = 0.0;
    for (size_t r = 0; r < m.ladder.size(); ++r) {
      auto& rd = rungs[r];
      const double nominal_mb = m.ladder[r].bitrate_mbps() * chunk_s;
      rd.chunk_sizes_mb.resize(m.chunks_per_segment);
      for (int c = 0; c < m.chunks_per_segment; ++c)
        rd.chunk_sizes_mb[c] = nominal_mb * std::exp(rng.gaussian(log_shift, sigma));
      double v = synthetic_vmaf(genre, m.ladder[r].bitrate_mbps());
      v += rng.uniform(-2.0, 2.0);
      v = std::clamp(v, 0.0, 100.0);
      v = std::max(v, prev_vmaf);  // keep vmaf non-decreasing across rungs
      rd.vmaf = v;
      prev_vmaf = v;
    }
  }
  m.validate();
  return m;
}

void save_manifest(const VideoManifest& m, const std::string& path) {
  nlohmann::json j;
  j["title"] = m.title;
  j["segment_duration_s"] = m.segment_duration_s;
  j["chunks_per_segment"] = m.chunks_per_segment;
  j["ladder"] = nlohmann::json::array();
  for (const auto& rep : m.ladder)
    j["ladder"].push_back({{"bitrate_kbps", rep.bitrate_kbps},
                           {"width", rep.width},
                           {"height", rep.height},
                           {"fps", rep.fps}});
  j["segments"] = nlohmann::json::array();
  for (const auto& seg : m.segments) {
    nlohmann::json jseg = nlohmann::json::array();
    for (const auto& rd : seg)
      jseg.push_back({{"chunk_sizes_mb", rd.chunk_sizes_mb}, {"vmaf", rd.vmaf}});
    j["segments"].push_back(std::move(jseg));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest: " + path);
  out << j.dump(1) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

VideoManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest JSON parse error: ") + e.what());
  }
  VideoManifest m;
  try {
    m.title = j.at("title").get<std::string>();
    m.segment_duration_s = j.at("segment_duration_s").get<double>();
    m.chunks_per_segment = j.at("chunks_per_segment").get<int>();
    for (const auto& jr : j.at("ladder")) {
      Representation rep;
      rep.bitrate_kbps = jr.at("bitrate_kbps").get<int>();
      rep.width = jr.at("width").get<int>();
      rep.height = jr.at("height").get<int>();
      rep.fps = jr.at("fps").get<double>();
      m.ladder.push_back(rep);
    }
    for (const auto& jseg : j.at("segments")) {
      std::vector<VideoManifest::RungData> rungs;
      for (const auto& jrd : jseg) {
        VideoManifest::RungData rd;
        rd.chunk_sizes_mb = jrd.at("chunk_sizes_mb").get<std::vector<double>>();
        rd.vmaf = jrd.at("vmaf").get<double>();
        rungs.push_back(std::move(rd));
      }
      m.segments.push_back(std::move(rungs));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest schema violation: ") + e.what());
  }
  m.validate();
  return m;
}

}  // namespace abrsim
