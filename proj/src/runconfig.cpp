#include "abrsim/runconfig.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace abrsim {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ValidationError("config: bad numeric value for " + key + ": '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ValidationError("config: bad integer value for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ValidationError("config: bad boolean value for " + key + ": '" + v + "'");
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::istringstream in(v);
  std::string part;
  while (std::getline(in, part, ',')) {
    part = trim(part);
    if (part.empty()) continue;
    out.push_back(static_cast<int>(to_long(key, part)));
  }
  if (out.empty()) throw ValidationError("config: empty list for " + key);
  return out;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

std::string fmt_list(const std::vector<int>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "seed") seed = static_cast<std::uint64_t>(to_long(key, v));
  else if (key == "traces_dir") traces_dir = v;
  else if (key == "manifest") manifest_path = v;
  else if (key == "out_dir") out_dir = v;
  else if (key == "checkpoint") checkpoint_path = v;
  else if (key == "abr") abr = v;
  else if (key == "jobs") jobs = static_cast<int>(to_long(key, v));
  else if (key == "session.segment_duration_s") session.segment_duration_s = to_double(key, v);
  else if (key == "session.chunks_per_segment") session.chunks_per_segment = static_cast<int>(to_long(key, v));
  else if (key == "session.segments") session.session_segments = static_cast<int>(to_long(key, v));
  else if (key == "session.startup_buffer_s") session.startup_buffer_s = to_double(key, v);
  else if (key == "session.resume_buffer_s") session.resume_buffer_s = to_double(key, v);
  else if (key == "session.latency_reference_s") session.latency_reference_s = to_double(key, v);
  else if (key == "session.trace_wrap") session.trace_wrap = to_bool(key, v);
  else if (key == "predictor.window") predictor.window = static_cast<int>(to_long(key, v));
  else if (key == "predictor.idle_discard_frac") predictor.idle_discard_frac = to_double(key, v);
  else if (key == "predictor.rls_order") predictor.rls_order = static_cast<int>(to_long(key, v));
  else if (key == "predictor.rls_forgetting") predictor.rls_forgetting = to_double(key, v);
  else if (key == "predictor.rls_delta") predictor.rls_delta = to_double(key, v);
  else if (key == "reward.k1") reward.k1 = to_double(key, v);
  else if (key == "reward.k2") reward.k2 = to_double(key, v);
  else if (key == "reward.k3") reward.k3 = to_double(key, v);
  else if (key == "reward.k4") reward.k4 = to_double(key, v);
  else if (key == "reward.k5") reward.k5 = to_double(key, v);
  else if (key == "reward.k6") reward.k6 = to_double(key, v);
  else if (key == "reward.k7") reward.k7 = to_double(key, v);
  else if (key == "reward.energy_ref_j") reward.energy_ref_j = to_double(key, v);
  else if (key == "reward.latency_ref_s") reward.latency_ref_s = to_double(key, v);
  else if (key == "reward.stall_cap_s") reward.stall_cap_s = to_double(key, v);
  else if (key == "reward.speed_band") reward.speed_band = to_double(key, v);
  else if (key == "reward.vmaf_scale") reward.vmaf_scale = to_double(key, v);
  else if (key == "qoe.alpha") qoe.alpha = to_double(key, v);
  else if (key == "qoe.beta") qoe.beta = to_double(key, v);
  else if (key == "qoe.gamma") qoe.gamma = to_double(key, v);
  else if (key == "qoe.sigma") qoe.sigma = to_double(key, v);
  else if (key == "qoe.mu") qoe.mu = to_double(key, v);
  else if (key == "qoe.omega") qoe.omega = to_double(key, v);
  else if (key == "energy.alpha_net") energy.alpha_net = to_double(key, v);
  else if (key == "energy.beta_net") energy.beta_net = to_double(key, v);
  else if (key == "playback.c0") playback.c0 = to_double(key, v);
  else if (key == "playback.c1") playback.c1 = to_double(key, v);
  else if (key == "playback.c2") playback.c2 = to_double(key, v);
  else if (key == "playback.c3") playback.c3 = to_double(key, v);
  else if (key == "sac.gamma") sac.gamma = to_double(key, v);
  else if (key == "sac.rho") sac.rho = to_double(key, v);
  else if (key == "sac.entropy_alpha") sac.entropy_alpha = to_double(key, v);
  else if (key == "sac.batch") sac.batch = static_cast<int>(to_long(key, v));
  else if (key == "sac.updates_per_round") sac.updates_per_round = static_cast<int>(to_long(key, v));
  else if (key == "sac.round_every") sac.round_every = static_cast<int>(to_long(key, v));
  else if (key == "sac.actor_lr") sac.actor_lr = to_double(key, v);
  else if (key == "sac.critic_lr") sac.critic_lr = to_double(key, v);
  else if (key == "sac.sync_interval") sac.sync_interval = static_cast<int>(to_long(key, v));
  else if (key == "sac.workers") sac.workers = static_cast<int>(to_long(key, v));
  else if (key == "sac.episodes") sac.episodes = static_cast<int>(to_long(key, v));
  else if (key == "sac.buffer_capacity") sac.buffer_capacity = static_cast<std::size_t>(to_long(key, v));
  else if (key == "sac.per_alpha") sac.per_alpha = to_double(key, v);
  else if (key == "sac.per_beta0") sac.per_beta0 = to_double(key, v);
  else if (key == "sac.per_eps") sac.per_eps = to_double(key, v);
  else if (key == "sac.start_steps") sac.start_steps = static_cast<int>(to_long(key, v));
  else if (key == "sac.update_after") sac.update_after = static_cast<int>(to_long(key, v));
  else if (key == "sac.hidden") sac.hidden = to_int_list(key, v);
  else if (key == "sac.log_std_min") sac.log_std_min = to_double(key, v);
  else if (key == "sac.log_std_max") sac.log_std_max = to_double(key, v);
  else throw ValidationError("config: unknown key '" + key + "'");
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

std::string RunConfig::echo() const {
  std::ostringstream o;
  o << "seed = " << seed << "\n";
  o << "traces_dir = " << traces_dir << "\n";
  o << "manifest = " << manifest_path << "\n";
  o << "out_dir = " << out_dir << "\n";
  o << "checkpoint = " << checkpoint_path << "\n";
  o << "abr = " << abr << "\n";
  o << "jobs = " << jobs << "\n";
  o << "session.segment_duration_s = " << fmt(session.segment_duration_s) << "\n";
  o << "session.chunks_per_segment = " << session.chunks_per_segment << "\n";
  o << "session.segments = " << session.session_segments << "\n";
  o << "session.startup_buffer_s = " << fmt(session.startup_buffer_s) << "\n";
  o << "session.resume_buffer_s = " << fmt(session.resume_buffer_s) << "\n";
  o << "session.latency_reference_s = " << fmt(session.latency_reference_s) << "\n";
  o << "session.trace_wrap = " << (session.trace_wrap ? "true" : "false") << "\n";
  o << "predictor.window = " << predictor.window << "\n";
  o << "predictor.idle_discard_frac = " << fmt(predictor.idle_discard_frac) << "\n";
  o << "predictor.rls_order = " << predictor.rls_order << "\n";
  o << "predictor.rls_forgetting = " << fmt(predictor.rls_forgetting) << "\n";
  o << "predictor.rls_delta = " << fmt(predictor.rls_delta) << "\n";
  o << "reward.k1 = " << fmt(reward.k1) << "\n";
  o << "reward.k2 = " << fmt(reward.k2) << "\n";
  o << "reward.k3 = " << fmt(reward.k3) << "\n";
  o << "reward.k4 = " << fmt(reward.k4) << "\n";
  o << "reward.k5 = " << fmt(reward.k5) << "\n";
  o << "reward.k6 = " << fmt(reward.k6) << "\n";
  o << "reward.k7 = " << fmt(reward.k7) << "\n";
  o << "reward.energy_ref_j = " << fmt(reward.energy_ref_j) << "\n";
  o << "reward.latency_ref_s = " << fmt(reward.latency_ref_s) << "\n";
  o << "reward.stall_cap_s = " << fmt(reward.stall_cap_s) << "\n";
  o << "reward.speed_band = " << fmt(reward.speed_band) << "\n";
  o << "reward.vmaf_scale = " << fmt(reward.vmaf_scale) << "\n";
  o << "qoe.alpha = " << fmt(qoe.alpha) << "\n";
  o << "qoe.beta = " << fmt(qoe.beta) << "\n";
  o << "qoe.gamma = " << fmt(qoe.gamma) << "\n";
  o << "qoe.sigma = " << fmt(qoe.sigma) << "\n";
  o << "qoe.mu = " << fmt(qoe.mu) << "\n";
  o << "qoe.omega = " << fmt(qoe.omega) << "\n";
  o << "energy.alpha_net = " << fmt(energy.alpha_net) << "\n";
  o << "energy.beta_net = " << fmt(energy.beta_net) << "\n";
  o << "playback.c0 = " << fmt(playback.c0) << "\n";
  o << "playback.c1 = " << fmt(playback.c1) << "\n";
  o << "playback.c2 = " << fmt(playback.c2) << "\n";
  o << "playback.c3 = " << fmt(playback.c3) << "\n";
  o << "sac.gamma = " << fmt(sac.gamma) << "\n";
  o << "sac.rho = " << fmt(sac.rho) << "\n";
  o << "sac.entropy_alpha = " << fmt(sac.entropy_alpha) << "\n";
  o << "sac.batch = " << sac.batch << "\n";
  o << "sac.updates_per_round = " << sac.updates_per_round << "\n";
  o << "sac.round_every = " << sac.round_every << "\n";
  o << "sac.actor_lr = " << fmt(sac.actor_lr) << "\n";
  o << "sac.critic_lr = " << fmt(sac.critic_lr) << "\n";
  o << "sac.sync_interval = " << sac.sync_interval << "\n";
  o << "sac.workers = " << sac.workers << "\n";
  o << "sac.episodes = " << sac.episodes << "\n";
  o << "sac.buffer_capacity = " << sac.buffer_capacity << "\n";
  o << "sac.per_alpha = " << fmt(sac.per_alpha) << "\n";
  o << "sac.per_beta0 = " << fmt(sac.per_beta0) << "\n";
  o << "sac.per_eps = " << fmt(sac.per_eps) << "\n";
  o << "sac.start_steps = " << sac.start_steps << "\n";
  o << "sac.update_after = " << sac.update_after << "\n";
  o << "sac.hidden = " << fmt_list(sac.hidden) << "\n";
  o << "sac.log_std_min = " << fmt(sac.log_std_min) << "\n";
  o << "sac.log_std_max = " << fmt(sac.log_std_max) << "\n";
  return o.str();
}

void RunConfig::write_echo(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write config echo: " + path);
  out << echo();
  if (!out) throw IoError("config echo write failed: " + path);
}

void RunConfig::validate() const {
  session.validate();
  reward.validate();
  energy.validate();
  playback.validate();
  sac.validate();
  if (jobs < 1) throw ValidationError("config: jobs must be >= 1");
}

}  // namespace abrsim
