#include "abrsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace abrsim {

namespace {

nlohmann::json record_to_json(const EpisodeRecord& r) {
  const auto& o = r.outcome;
  return nlohmann::json{{"v", 1},
                        {"segment", o.segment_index},
                        {"rung", o.rung},
                        {"bitrate_kbps", o.bitrate_kbps},
                        {"vmaf", o.vmaf},
                        {"vmaf_prev", o.vmaf_prev},
                        {"stall_s", o.stall_duration_s},
                        {"stall_event", o.stall_event},
                        {"latency_s", o.latency_s},
                        {"speed", o.speed},
                        {"predicted_bw_mbps", o.predicted_bw_mbps},
                        {"data_energy_j", o.data_energy_j},
                        {"playback_energy_j", o.playback_energy_j},
                        {"downloaded_mb", o.downloaded_mb},
                        {"buffer_s", r.buffer_s},
                        {"wall_s", r.wall_s},
                        {"reward", r.reward}};
}

EpisodeRecord record_from_json(const nlohmann::json& j) {
  EpisodeRecord r;
  auto& o = r.outcome;
  o.segment_index = j.at("segment").get<int>();
  o.rung = j.at("rung").get<int>();
  o.bitrate_kbps = j.at("bitrate_kbps").get<double>();
  o.vmaf = j.at("vmaf").get<double>();
  o.vmaf_prev = j.at("vmaf_prev").get<double>();
  o.stall_duration_s = j.at("stall_s").get<double>();
  o.stall_event = j.at("stall_event").get<bool>();
  o.latency_s = j.at("latency_s").get<double>();
  o.speed = j.at("speed").get<double>();
  o.predicted_bw_mbps = j.at("predicted_bw_mbps").get<double>();
  o.data_energy_j = j.at("data_energy_j").get<double>();
  o.playback_energy_j = j.at("playback_energy_j").get<double>();
  o.downloaded_mb = j.at("downloaded_mb").get<double>();
  r.buffer_s = j.at("buffer_s").get<double>();
  r.wall_s = j.at("wall_s").get<double>();
  r.reward = j.at("reward").get<double>();
  return r;
}

}  // namespace

std::vector<EpisodeRecord> session_records(const SessionResult& result) {
  std::vector<EpisodeRecord> records(result.outcomes.size());
  for (size_t i = 0; i < result.outcomes.size(); ++i) {
    records[i].outcome = result.outcomes[i];
    records[i].reward = result.rewards[i];
    records[i].buffer_s = result.buffers_s[i];
    records[i].wall_s = result.wall_times_s[i];
  }
  return records;
}

void write_episode_jsonl(const std::string& path, const std::vector<EpisodeRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write episode log: " + path);
  for (const auto& r : records) out << record_to_json(r).dump() << "\n";
  if (!out) throw IoError("episode log write failed: " + path);
}

std::vector<EpisodeRecord> read_episode_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open episode log: " + path);
  std::vector<EpisodeRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.at("v").get<int>() != 1) throw ParseError("unsupported episode log version");
      records.push_back(record_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("episode log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

void write_summary_json(const std::string& path, const SessionSummary& s, const std::string& abr,
                        const std::string& trace_label, std::uint64_t seed) {
  nlohmann::json j{{"abr", abr},
                   {"trace", trace_label},
                   {"seed", seed},
                   {"segments", s.segments},
                   {"quality_level", s.quality_level},
                   {"smoothness", s.smoothness},
                   {"data_dl_mb", s.data_dl_mb},
                   {"bitrate_mbps", s.mean_bitrate_mbps},
                   {"latency_s", s.mean_latency_s},
                   {"speed", s.mean_speed},
                   {"freezing_s", s.freezing_s},
                   {"freezing_events", s.freezing_events},
                   {"energy_kj", s.energy_kj},
                   {"qoe", s.qoe},
                   {"energy_efficiency", s.energy_efficiency}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write summary: " + path);
  out << j.dump(1) << "\n";
  if (!out) throw IoError("summary write failed: " + path);
}

std::string evaluation_csv_header() {
  return "abr,trace,quality_level,smoothness,data_dl_mb,bitrate_mbps,latency_s,speed,"
         "freezing_s,energy_kj,qoe,energy_efficiency,status";
}

std::string evaluation_csv_row(const EvalRow& row) {
  char buf[512];
  if (row.error) {
    std::snprintf(buf, sizeof(buf), "%s,%s,,,,,,,,,,,error:%s", row.abr.c_str(),
                  row.trace.c_str(), row.error_message.c_str());
    return buf;
  }
  const auto& s = row.summary;
  std::snprintf(buf, sizeof(buf),
                "%s,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,ok", row.abr.c_str(),
                row.trace.c_str(), s.quality_level, s.smoothness, s.data_dl_mb,
                s.mean_bitrate_mbps, s.mean_latency_s, s.mean_speed, s.freezing_s, s.energy_kj,
                s.qoe, s.energy_efficiency);
  return buf;
}

std::vector<EvalRow> aggregate_rows(const std::vector<EvalRow>& rows) {
  // Preserve first-seen controller order.
  std::vector<std::string> order;
  std::map<std::string, std::vector<const SessionSummary*>> by_abr;
  for (const auto& r : rows) {
    if (r.error) continue;
    if (by_abr.find(r.abr) == by_abr.end()) order.push_back(r.abr);
    by_abr[r.abr].push_back(&r.summary);
  }
  std::vector<EvalRow> out;
  for (const auto& abr : order) {
    const auto& group = by_abr[abr];
    if (group.empty()) continue;
    const double n = static_cast<double>(group.size());

    auto fold = [&](auto getter) {
      double mean = 0.0, var = 0.0;
      for (const auto* s : group) mean += getter(*s);
      mean /= n;
      for (const auto* s : group) var += (getter(*s) - mean) * (getter(*s) - mean);
      return std::pair<double, double>(mean, std::sqrt(var / n));
    };

    EvalRow mean_row, std_row;
    mean_row.abr = std_row.abr = abr;
    mean_row.trace = "mean";
    std_row.trace = "std";
    SessionSummary &m = mean_row.summary, &sd = std_row.summary;
#define ABRSIM_AGG(field)                                             \
  {                                                                   \
    auto [mu, s] = fold([](const SessionSummary& x) { return x.field; }); \
    m.field = mu;                                                     \
    sd.field = s;                                                     \
  }
    ABRSIM_AGG(quality_level)
    ABRSIM_AGG(smoothness)
    ABRSIM_AGG(data_dl_mb)
    ABRSIM_AGG(mean_bitrate_mbps)
    ABRSIM_AGG(mean_latency_s)
    ABRSIM_AGG(mean_speed)
    ABRSIM_AGG(freezing_s)
    ABRSIM_AGG(energy_kj)
    ABRSIM_AGG(qoe)
    ABRSIM_AGG(energy_efficiency)
#undef ABRSIM_AGG
    out.push_back(mean_row);
    out.push_back(std_row);
  }
  return out;
}

void write_evaluation_csv(const std::string& path, const std::vector<EvalRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write evaluation csv: " + path);
  out << evaluation_csv_header() << "\n";
  for (const auto& r : rows) out << evaluation_csv_row(r) << "\n";
  for (const auto& r : aggregate_rows(rows)) out << evaluation_csv_row(r) << "\n";
  if (!out) throw IoError("evaluation csv write failed: " + path);
}

namespace {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

std::string svg_panel(const Series& main, const Series* extra, double x_max, int panel_index,
                      int width, int panel_height, int margin_left) {
  std::ostringstream svg;
  const int top = panel_index * (panel_height + 24) + 20;
  const int plot_w = width - margin_left - 20;
  const int plot_h = panel_height - 28;

  double y_min = 0.0, y_max = 1e-9;
  for (double v : main.y) y_max = std::max(y_max, v);
  if (extra)
    for (double v : extra->y) y_max = std::max(y_max, v);
  y_max *= 1.05;

  auto sx = [&](double x) { return margin_left + (x_max > 0 ? x / x_max : 0.0) * plot_w; };
  auto sy = [&](double y) {
    return top + plot_h - (y - y_min) / (y_max - y_min) * plot_h;
  };

  svg << "<rect x='" << margin_left << "' y='" << top << "' width='" << plot_w << "' height='"
      << plot_h << "' fill='none' stroke='#888'/>\n";
  svg << "<text x='8' y='" << top + 12 << "' font-size='12' fill='#222'>" << main.label
      << "</text>\n";
  char num[48];
  std::snprintf(num, sizeof(num), "%.2f", y_max);
  svg << "<text x='" << margin_left + 4 << "' y='" << top + 12
      << "' font-size='10' fill='#666'>" << num << "</text>\n";

  auto polyline = [&](const Series& s, const char* color) {
    if (s.x.empty()) return;
    svg << "<polyline fill='none' stroke='" << color << "' stroke-width='1' points='";
    for (size_t i = 0; i < s.x.size(); ++i) {
      std::snprintf(num, sizeof(num), "%.2f,%.2f ", sx(s.x[i]), sy(std::max(0.0, s.y[i])));
      svg << num;
    }
    svg << "'/>\n";
  };
  polyline(main, "#1f77b4");
  if (extra) {
    polyline(*extra, "#d62728");
    svg << "<text x='" << width - 150 << "' y='" << top + 12
        << "' font-size='10' fill='#d62728'>" << extra->label << "</text>\n";
  }
  return svg.str();
}

}  // namespace

std::string render_session_svg(const std::vector<EpisodeRecord>& records,
                               const NetworkTrace* trace) {
  if (records.empty()) throw ValidationError("render_session_svg: no records");
  const int width = 900, panel_height = 130, margin_left = 60;
  const int height = 5 * (panel_height + 24) + 30;

  double x_max = records.back().wall_s;
  std::vector<double> xs(records.size());
  for (size_t i = 0; i < records.size(); ++i) xs[i] = records[i].wall_s;

  Series bandwidth{"bandwidth (Mbps)", {}, {}};
  if (trace) {
    for (const auto& s : trace->samples) {
      if (s.time_s > x_max) break;
      bandwidth.x.push_back(s.time_s);
      bandwidth.y.push_back(s.bandwidth_mbps);
    }
  }
  Series predicted{"predicted", xs, {}};
  Series bitrate{"bitrate (kbps)", xs, {}};
  Series buffer{"buffer (s)", xs, {}};
  Series latency{"latency (s)", xs, {}};
  Series vmaf{"vmaf", xs, {}};
  for (const auto& r : records) {
    predicted.y.push_back(r.outcome.predicted_bw_mbps);
    bitrate.y.push_back(r.outcome.bitrate_kbps);
    buffer.y.push_back(r.buffer_s);
    latency.y.push_back(r.outcome.latency_s);
    vmaf.y.push_back(r.outcome.vmaf);
  }

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "' viewBox='0 0 " << width << " " << height << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  if (bandwidth.x.empty()) {
    bandwidth = predicted;
    bandwidth.label = "predicted bandwidth (Mbps)";
    svg << svg_panel(bandwidth, nullptr, x_max, 0, width, panel_height, margin_left);
  } else {
    svg << svg_panel(bandwidth, &predicted, x_max, 0, width, panel_height, margin_left);
  }
  svg << svg_panel(bitrate, nullptr, x_max, 1, width, panel_height, margin_left);
  svg << svg_panel(buffer, nullptr, x_max, 2, width, panel_height, margin_left);
  svg << svg_panel(latency, nullptr, x_max, 3, width, panel_height, margin_left);
  svg << svg_panel(vmaf, nullptr, x_max, 4, width, panel_height, margin_left);
  svg << "</svg>\n";
  return svg.str();
}

void write_session_svg(const std::string& path, const std::vector<EpisodeRecord>& records,
                       const NetworkTrace* trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write svg: " + path);
  out << render_session_svg(records, trace);
  if (!out) throw IoError("svg write failed: " + path);
}

}  // namespace abrsim
