#include "abrsim/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace abrsim {

void NetworkTrace::validate() const {
  if (samples.empty()) throw ValidationError("trace '" + label + "': no samples");
  if (samples.front().time_s != 0.0)
    throw ValidationError("trace '" + label + "': first sample time must be 0");
  double prev = -1.0;
  for (const auto& s : samples) {
    if (!(s.time_s > prev))
      throw ValidationError("trace '" + label + "': sample times not strictly increasing");
    if (!(s.bandwidth_mbps > 0.0))
      throw ValidationError("trace '" + label + "': non-positive bandwidth at t=" +
                            std::to_string(s.time_s));
    prev = s.time_s;
  }
  if (duration_s < samples.back().time_s)
    throw ValidationError("trace '" + label + "': duration shorter than last sample time");
}

double NetworkTrace::mean_bandwidth_mbps() const {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : samples) sum += s.bandwidth_mbps;
  return sum / static_cast<double>(samples.size());
}

void TraceGenSpec::validate() const {
  if (!(min_bw_mbps > 0.0)) throw ValidationError("trace gen: min_bw must be > 0");
  if (!(mean_bw_mbps > min_bw_mbps)) throw ValidationError("trace gen: mean_bw must exceed min_bw");
  if (fluctuation < 0.0 || fluctuation > 1.0)
    throw ValidationError("trace gen: fluctuation must lie in [0, 1]");
  if (!(step_period_s > 0.0)) throw ValidationError("trace gen: step_period must be > 0");
  if (!(duration_s > 0.0)) throw ValidationError("trace gen: duration must be > 0");
}

namespace {

double wrap_time(const NetworkTrace& trace, double t_s, bool wrap) {
  if (t_s < 0.0) throw ValidationError("bandwidth_at: negative time");
  if (t_s < trace.duration_s) return t_s;
  if (!wrap)
    throw ValidationError("bandwidth_at: t=" + std::to_string(t_s) +
                          " beyond trace duration with wrap disabled");
  double local = std::fmod(t_s, trace.duration_s);
  if (local < 0.0) local = 0.0;
  return local;
}

}  // namespace

double bandwidth_at(const NetworkTrace& trace, double t_s, bool wrap) {
  const double local = wrap_time(trace, t_s, wrap);
  // Latest sample with time <= local.
  auto it = std::upper_bound(trace.samples.begin(), trace.samples.end(), local,
                             [](double t, const NetworkTrace::Sample& s) { return t < s.time_s; });
  if (it == trace.samples.begin()) return trace.samples.front().bandwidth_mbps;
  return std::prev(it)->bandwidth_mbps;
}

double next_bandwidth_change(const NetworkTrace& trace, double t_s, bool wrap) {
  const double local = wrap_time(trace, t_s, wrap);
  auto it = std::upper_bound(trace.samples.begin(), trace.samples.end(), local,
                             [](double t, const NetworkTrace::Sample& s) { return t < s.time_s; });
  const double next_local = (it == trace.samples.end()) ? trace.duration_s : it->time_s;
  return t_s + (next_local - local);
}

NetworkTrace parse_network_trace(const std::string& text, const std::string& label) {
  NetworkTrace trace;
  trace.label = label;
  double explicit_duration = -1.0;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "#duration=";
      if (line.rfind(key, 0) == 0) {
        try {
          explicit_duration = std::stod(line.substr(key.size()));
        } catch (const std::exception&) {
          throw ParseError("trace '" + label + "' line " + std::to_string(lineno) +
                           ": bad duration comment");
        }
      }
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError("trace '" + label + "' line " + std::to_string(lineno) + ": expected 'time,bandwidth'");
    try {
      size_t used = 0;
      const double t = std::stod(line.substr(0, comma), &used);
      const double bw = std::stod(line.substr(comma + 1), &used);
      trace.samples.push_back({t, bw});
    } catch (const std::exception&) {
      throw ParseError("trace '" + label + "' line " + std::to_string(lineno) + ": malformed row");
    }
  }
  if (trace.samples.empty()) throw ParseError("trace '" + label + "': empty file");

  if (explicit_duration >= 0.0) {
    trace.duration_s = explicit_duration;
  } else if (trace.samples.size() >= 2) {
    const double last = trace.samples.back().time_s;
    const double gap = last - trace.samples[trace.samples.size() - 2].time_s;
    trace.duration_s = last + gap;
  } else {
    trace.duration_s = trace.samples.back().time_s + 1.0;
  }
  trace.validate();
  return trace;
}

NetworkTrace load_network_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  // Label is the file name without directories.
  const auto slash = path.find_last_of('/');
  return parse_network_trace(buf.str(), slash == std::string::npos ? path : path.substr(slash + 1));
}

void save_network_trace(const NetworkTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write trace file: " + path);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "#duration=%.6f\n", trace.duration_s);
  out << buf;
  for (const auto& s : trace.samples) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", s.time_s, s.bandwidth_mbps);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path);
}

NetworkTrace generate_synthetic_trace(const TraceGenSpec& spec) {
  spec.validate();
  NetworkTrace trace;
  trace.label = "synthetic-" + std::to_string(spec.seed);
  trace.duration_s = spec.duration_s;
  Rng rng(spec.seed);
  const double cap = 4.0 * spec.mean_bw_mbps;
  double bw = spec.mean_bw_mbps;
  for (double t = 0.0; t < spec.duration_s; t += spec.step_period_s) {
    trace.samples.push_back({t, bw});
    bw = std::clamp(bw * std::exp(rng.gaussian(0.0, spec.fluctuation)), spec.min_bw_mbps, cap);
  }
  trace.validate();
  return trace;
}

namespace {

const std::vector<std::string> kPresetNames = {"3g", "lte", "4g", "5g", "synthetic"};
// Share of each family when generating a mixed pool.
const std::vector<double> kPresetWeights = {0.20, 0.20, 0.10, 0.30, 0.20};

}  // namespace

TraceGenSpec trace_preset(const std::string& name) {
  TraceGenSpec spec;
  if (name == "3g") {
    spec.mean_bw_mbps = 0.82;
    spec.fluctuation = 0.25;
  } else if (name == "lte") {
    spec.mean_bw_mbps = 3.86;
    spec.fluctuation = 0.3;
  } else if (name == "4g") {
    spec.mean_bw_mbps = 30.21;
    spec.fluctuation = 0.3;
  } else if (name == "5g") {
    spec.mean_bw_mbps = 520.66;
    spec.fluctuation = 0.3;
  } else if (name == "synthetic") {
    spec.mean_bw_mbps = 3.07;
    spec.fluctuation = 0.5;
  } else {
    throw ValidationError("unknown trace preset: " + name);
  }
  spec.min_bw_mbps = spec.mean_bw_mbps / 20.0;
  spec.step_period_s = 1.0;
  spec.duration_s = 320.0;
  return spec;
}

const std::vector<std::string>& trace_preset_names() { return kPresetNames; }
const std::vector<double>& trace_preset_weights() { return kPresetWeights; }

}  // namespace abrsim
