#include "abrsim/sim.hpp"

#include <algorithm>
#include <cmath>

namespace abrsim {

namespace {
// A buffer that lands exactly on a gate threshold does not trigger it; the
// guard keeps that comparison stable under accumulated rounding.
constexpr double kGateGuard = 1e-9;
}  // namespace

void SessionConfig::validate() const {
  if (!(segment_duration_s > 0.0)) throw ValidationError("session: segment duration must be > 0");
  if (chunks_per_segment < 1) throw ValidationError("session: chunks_per_segment must be >= 1");
  if (session_segments < 1) throw ValidationError("session: session_segments must be >= 1");
  if (!(resume_buffer_s > 0.0) || startup_buffer_s < resume_buffer_s)
    throw ValidationError("session: need startup_buffer >= resume_buffer > 0");
  if (!(latency_reference_s > 0.0)) throw ValidationError("session: latency reference must be > 0");
}

int map_bitrate(double frac, int ladder_size) {
  if (ladder_size < 1) throw ValidationError("map_bitrate: empty ladder");
  const double f = clamp01(frac);
  return static_cast<int>(std::floor(f * (ladder_size - 1) + 0.5));
}

double map_speed(double frac) { return 0.90 + 0.20 * clamp01(frac); }

Observation normalize(const RawFeatures& f, double ladder_min_kbps, double ladder_max_kbps) {
  Observation o;
  o(0) = clamp01(f.buffer_s / 10.0);
  o(1) = clamp01(f.latency_s / 30.0);
  o(2) = clamp01(f.stall_s / 4.0);
  o(3) = clamp01((f.speed - 0.9) / 0.2);
  const double span = ladder_max_kbps - ladder_min_kbps;
  o(4) = span > 0.0 ? clamp01((f.bitrate_kbps - ladder_min_kbps) / span) : 0.0;
  o(5) = clamp01(f.vmaf / 100.0);
  o(6) = clamp01(f.vmaf_delta / 100.0);
  const double bw = std::min(f.predicted_bw_mbps, 1000.0);
  o(7) = clamp01(std::log10(1.0 + std::max(bw, 0.0)) / std::log10(1001.0));
  o(8) = clamp01(f.data_energy_j / 5.0);
  o(9) = clamp01(f.playback_energy_j / 5.0);
  return o;
}

LiveSession::LiveSession(SessionConfig config, std::shared_ptr<const NetworkTrace> trace,
                         std::shared_ptr<const VideoManifest> manifest,
                         RewardWeights reward_weights, EnergyCoefficients energy,
                         PlaybackCoefficients playback, PredictorConfig predictor)
    : config_(config),
      trace_(std::move(trace)),
      manifest_(std::move(manifest)),
      reward_weights_(reward_weights),
      energy_(energy),
      playback_(playback),
      predictor_cfg_(predictor),
      estimator_(predictor.window, predictor.idle_discard_frac),
      rls_(predictor.rls_order, predictor.rls_forgetting, predictor.rls_delta) {
  config_.validate();
  if (!trace_ || !manifest_) throw ValidationError("LiveSession: missing trace or manifest");
  trace_->validate();
  manifest_->validate();
  reward_weights_.validate();
  energy_.validate();
  playback_.validate();
  if (manifest_->num_segments() < config_.session_segments)
    throw ValidationError("LiveSession: manifest has fewer segments than the session needs");
  if (manifest_->chunks_per_segment != config_.chunks_per_segment ||
      manifest_->segment_duration_s != config_.segment_duration_s)
    throw ValidationError("LiveSession: manifest segment geometry disagrees with session config");
}

StepResult LiveSession::reset() {
  wall_ = 0.0;
  playhead_ = 0.0;
  chunks_downloaded_ = 0;
  playback_started_ = false;
  stalled_ = false;
  playback_start_wall_ = 0.0;
  total_stall_s_ = 0.0;
  stall_events_ = 0;
  total_downloaded_mb_ = 0.0;
  total_energy_j_ = 0.0;
  last_chunk_throughput_mbps_ = 0.0;
  next_segment_ = 0;
  done_ = false;
  started_ = true;
  estimator_ = SlidingWindowEstimator(predictor_cfg_.window, predictor_cfg_.idle_discard_frac);
  rls_ = RlsFilter(predictor_cfg_.rls_order, predictor_cfg_.rls_forgetting,
                   predictor_cfg_.rls_delta);
  media_speeds_.assign(config_.session_segments, 1.0);
  vmaf_prev_ = vmaf_of(*manifest_, 0, 0);

  return run_segment(0, 0, 1.0);  // startup segment: lowest rung, default speed
}

StepResult LiveSession::step(const Action& action) {
  if (!started_) throw ValidationError("step before reset");
  if (done_) throw ValidationError("stepping a finished episode");
  const Action a(action.bitrate_frac, action.speed_frac);  // re-clamp on entry
  const int rung = map_bitrate(a.bitrate_frac, manifest_->num_rungs());
  const double speed = map_speed(a.speed_frac);
  return run_segment(next_segment_, rung, speed);
}

StepResult LiveSession::run_segment(int segment, int rung, double speed) {
  media_speeds_[segment] = speed;
  step_stall_s_ = 0.0;
  step_stall_event_ = false;

  const auto& rung_data = segment_rung(*manifest_, segment, rung);
  const double seg_start = segment * config_.segment_duration_s;
  const double chunk_s = config_.chunk_duration_s();

  ChunkEnergyInput energy_chunks;
  energy_chunks.reserve(rung_data.chunk_sizes_mb.size());
  double downloaded_mb = 0.0;

  for (int j = 0; j < config_.chunks_per_segment; ++j) {
    const double size_mb = rung_data.chunk_sizes_mb[j];
    const double avail = seg_start + chunk_s * (j + 1);
    double idle = 0.0;
    if (avail > wall_) {
      idle = avail - wall_;
      advance_playback(avail);
    }
    const bool had_prediction = rls_.ready();
    double th_pred = had_prediction ? rls_.predict_mbps() : 0.0;

    const double dl_start = wall_;
    const double dl_end = advance_download(dl_start, size_mb);
    const double dl_time = std::max(dl_end - dl_start, 1e-12);
    advance_playback(dl_end);
    ++chunks_downloaded_;
    on_chunk_downloaded();

    last_chunk_throughput_mbps_ = size_mb / dl_time;
    if (estimator_.record_chunk({size_mb, dl_time, idle}))
      rls_.update(estimator_.measure_mbps());
    if (!had_prediction) th_pred = last_chunk_throughput_mbps_;

    energy_chunks.emplace_back(th_pred, size_mb);
    downloaded_mb += size_mb;
  }

  const double data_j = data_energy_j(energy_chunks, energy_);
  const double playback_j =
      playback_energy_j(manifest_->ladder[rung], config_.segment_duration_s, playback_);
  total_energy_j_ += data_j + playback_j;
  total_downloaded_mb_ += downloaded_mb;

  StepOutcome out;
  out.segment_index = segment;
  out.rung = rung;
  out.bitrate_kbps = manifest_->ladder[rung].bitrate_kbps;
  out.vmaf = rung_data.vmaf;
  out.vmaf_prev = vmaf_prev_;
  out.stall_duration_s = step_stall_s_;
  out.stall_event = step_stall_event_;
  out.latency_s = latency();
  out.speed = speed;
  out.predicted_bw_mbps = predicted_bandwidth_mbps();
  out.data_energy_j = data_j;
  out.playback_energy_j = playback_j;
  out.downloaded_mb = downloaded_mb;
  vmaf_prev_ = out.vmaf;

  next_segment_ = segment + 1;
  StepResult result;
  result.outcome = out;
  result.reward = step_reward(out, reward_weights_);
  if (next_segment_ >= config_.session_segments) {
    done_ = true;
    drain_remaining_media();
  }

  RawFeatures raw;
  raw.buffer_s = buffer_level();
  raw.latency_s = out.latency_s;
  raw.stall_s = out.stall_duration_s;
  raw.speed = out.speed;
  raw.bitrate_kbps = out.bitrate_kbps;
  raw.vmaf = out.vmaf;
  raw.vmaf_delta = std::abs(out.vmaf - out.vmaf_prev);
  raw.predicted_bw_mbps = out.predicted_bw_mbps;
  raw.data_energy_j = out.data_energy_j;
  raw.playback_energy_j = out.playback_energy_j;
  result.raw = raw;
  result.obs = normalize(raw, manifest_->min_bitrate_kbps(), manifest_->max_bitrate_kbps());
  result.done = done_;
  return result;
}

int LiveSession::media_segment_at(double playhead) const {
  int seg = static_cast<int>(playhead / config_.segment_duration_s);
  // Exact boundary landings belong to the segment that starts there.
  if ((seg + 1) * config_.segment_duration_s <= playhead) ++seg;
  return std::min(seg, config_.session_segments - 1);
}

void LiveSession::advance_playback(double to_wall) {
  if (to_wall <= wall_) return;
  if (!playback_started_) {
    wall_ = to_wall;
    return;
  }
  double now = wall_;
  while (now < to_wall) {
    if (stalled_) {
      const double dt = to_wall - now;
      total_stall_s_ += dt;
      step_stall_s_ += dt;
      now = to_wall;
      break;
    }
    const double edge = buffered_edge();
    if (edge - playhead_ <= 0.0) {
      stalled_ = true;
      ++stall_events_;
      step_stall_event_ = true;
      continue;
    }
    const int seg = media_segment_at(playhead_);
    const double seg_end = (seg + 1) * config_.segment_duration_s;
    const double target = std::min(seg_end, edge);
    const double speed = media_speeds_[seg];
    const double wall_needed = (target - playhead_) / speed;
    const double dt_left = to_wall - now;
    if (wall_needed <= dt_left) {
      now += wall_needed;
      playhead_ = target;
    } else {
      playhead_ += dt_left * speed;
      now = to_wall;
    }
  }
  wall_ = to_wall;
}

void LiveSession::drain_remaining_media() {
  // All media is buffered at this point, so no stall can occur; play out
  // the remainder so wall-clock totals cover the whole session.
  const double total_media = config_.session_segments * config_.segment_duration_s;
  while (playhead_ < total_media) {
    const int seg = media_segment_at(playhead_);
    const double target = std::min((seg + 1) * config_.segment_duration_s, total_media);
    wall_ += (target - playhead_) / media_speeds_[seg];
    playhead_ = target;
  }
}

void LiveSession::on_chunk_downloaded() {
  if (!playback_started_) {
    if (buffer_level() > config_.startup_buffer_s + kGateGuard) {
      playback_started_ = true;
      playback_start_wall_ = wall_;
    }
  } else if (stalled_) {
    if (buffer_level() > config_.resume_buffer_s + kGateGuard) stalled_ = false;
  }
}

double LiveSession::advance_download(double start_wall, double size_mb) const {
  double t = start_wall;
  double remaining = size_mb;
  for (;;) {
    const double bw = bandwidth_at(*trace_, t, config_.trace_wrap);
    const double boundary = next_bandwidth_change(*trace_, t, config_.trace_wrap);
    const double cap = boundary - t;
    const double need = remaining / bw;
    if (need <= cap) return t + need;
    remaining -= bw * cap;
    t = boundary;
  }
}

PlayerState LiveSession::player() const {
  PlayerState p;
  p.wall_clock_s = wall_;
  p.playhead_s = playhead_;
  p.buffer_s = buffer_level();
  p.latency_s = latency();
  p.speed = playback_started_ ? media_speeds_[media_segment_at(playhead_)] : 1.0;
  p.stalled = stalled_;
  p.playback_started = playback_started_;
  p.playback_start_wall_s = playback_start_wall_;
  p.total_stall_s = total_stall_s_;
  p.stall_events = stall_events_;
  p.total_downloaded_mb = total_downloaded_mb_;
  p.total_energy_j = total_energy_j_;
  return p;
}

double LiveSession::measured_bandwidth_mbps() const {
  if (estimator_.has_measurement()) return estimator_.measure_mbps();
  return last_chunk_throughput_mbps_;
}

double LiveSession::predicted_bandwidth_mbps() const {
  if (rls_.ready()) return rls_.predict_mbps();
  return measured_bandwidth_mbps();
}

}  // namespace abrsim
