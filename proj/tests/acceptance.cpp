// Acceptance suite. Each criterion runs at its stated tolerance and prints
// one [PASS]/[FAIL] line; the process exits non-zero if any criterion fails.
//
// Usage: abrsim_acceptance [--only <name>] [--skip <name>] [--list]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "abrsim/report.hpp"
#include "abrsim/runner.hpp"
#include "abrsim/trainer.hpp"

using namespace abrsim;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::shared_ptr<const NetworkTrace> preset_trace(const std::string& preset, std::uint64_t seed,
                                                 double duration = 320.0) {
  TraceGenSpec spec = trace_preset(preset);
  spec.seed = seed;
  spec.duration_s = duration;
  return std::make_shared<NetworkTrace>(generate_synthetic_trace(spec));
}

// ---------------------------------------------------------------------------
// Simulator conservation: wall clock and latency identities over 100 seeded
// episodes across all three ladders, 1e-6 s tolerance.
void criterion_conservation() {
  const char* genres[3] = {"animation", "movie", "sports"};
  std::map<std::string, std::shared_ptr<const VideoManifest>> manifests;
  for (const char* g : genres)
    manifests[g] = std::make_shared<VideoManifest>(generate_manifest(g, 300, 11));

  double worst_wall = 0.0, worst_latency = 0.0;
  for (int ep = 0; ep < 100; ++ep) {
    const std::string genre = genres[ep % 3];
    SessionConfig cfg;
    cfg.session_segments = 300;
    auto trace = preset_trace(ep % 2 == 0 ? "synthetic" : "lte", 100 + ep);
    LiveSession env(cfg, trace, manifests[genre], RewardWeights{}, EnergyCoefficients{},
                    PlaybackCoefficients{});
    Rng rng(ep);
    env.reset();
    while (!env.done()) env.step(Action(rng.uniform(), rng.uniform()));

    const PlayerState p = env.player();
    double media_wall = 0.0, speed_drain = 0.0;
    for (double s : env.media_speeds()) {
      media_wall += cfg.segment_duration_s / s;
      speed_drain += cfg.segment_duration_s * (s - 1.0) / s;
    }
    const double wall_err =
        std::abs(p.wall_clock_s - (p.playback_start_wall_s + media_wall + p.total_stall_s));
    const double latency_end = p.wall_clock_s - p.playhead_s;
    const double latency_err = std::abs(
        latency_end - (p.playback_start_wall_s + p.total_stall_s - speed_drain));
    worst_wall = std::max(worst_wall, wall_err);
    worst_latency = std::max(worst_latency, latency_err);
  }
  require(worst_wall < 1e-6, "wall-clock conservation error " + fmt(worst_wall));
  require(worst_latency < 1e-6, "latency identity error " + fmt(worst_latency));
}

// ---------------------------------------------------------------------------
// QoE oracle equivalence on 1000 random sessions at 1e-9, and the exact
// per-stall-event linearity of the gamma coefficient.
void criterion_qoe_oracle() {
  const QoECoefficients c;
  Rng rng(42);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int T = 1 + static_cast<int>(rng.uniform() * 300);
    std::vector<StepOutcome> outs(T);
    for (auto& o : outs) {
      o.vmaf = rng.uniform(0.0, 100.0);
      o.stall_event = rng.uniform() < 0.2;
      o.stall_duration_s = o.stall_event ? rng.uniform(0.0, 5.0) : 0.0;
      o.latency_s = rng.uniform(0.0, 15.0);
      o.speed = rng.uniform(0.9, 1.1);
    }
    double qoe = 0.0;
    for (int i = 0; i < T; ++i) qoe += c.alpha * outs[i].vmaf / 20.0;
    for (int i = 0; i < T; ++i) qoe -= c.beta * outs[i].stall_duration_s;
    int events = 0;
    for (int i = 0; i < T; ++i) events += outs[i].stall_event ? 1 : 0;
    qoe -= c.gamma * events;
    double lat = 0.0;
    for (int i = 0; i < T; ++i) lat += outs[i].latency_s;
    qoe -= c.sigma * lat / T;
    for (int i = 0; i < T; ++i) qoe -= c.mu * std::abs(1.0 - outs[i].speed);
    for (int i = 1; i < T; ++i) qoe -= c.omega * std::abs(outs[i].vmaf - outs[i - 1].vmaf) / 20.0;
    worst = std::max(worst, std::abs(session_qoe(outs, c) - qoe));

    // gamma linearity: toggling one zero-duration stall event moves the
    // score by exactly 2.897
    std::vector<StepOutcome> flipped = outs;
    flipped[T / 2].stall_event = false;
    flipped[T / 2].stall_duration_s = 0.0;
    const double off = session_qoe(flipped, c);
    flipped[T / 2].stall_event = true;
    const double on = session_qoe(flipped, c);
    require(std::abs((off - on) - 2.897) < 1e-9,
            "gamma linearity broke: delta " + fmt(off - on));
  }
  require(worst < 1e-9, "qoe oracle deviation " + fmt(worst));
}

// ---------------------------------------------------------------------------
// Energy model property suite plus the session-scale magnitude check.
void criterion_energy_model() {
  Rng rng(7);
  const EnergyCoefficients c{1.0, 0.1};
  for (int trial = 0; trial < 200; ++trial) {
    ChunkEnergyInput a, b;
    const int na = 1 + static_cast<int>(rng.uniform() * 8);
    const int nb = 1 + static_cast<int>(rng.uniform() * 8);
    for (int i = 0; i < na; ++i) a.push_back({rng.uniform(0.2, 50.0), rng.uniform(0.01, 3.0)});
    for (int i = 0; i < nb; ++i) b.push_back({rng.uniform(0.2, 50.0), rng.uniform(0.01, 3.0)});
    ChunkEnergyInput ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    require(std::abs(data_energy_j(ab, c) - data_energy_j(a, c) - data_energy_j(b, c)) < 1e-9,
            "additivity over concatenation failed");

    const EnergyCoefficients beta_only{0.0, 0.1};
    ChunkEnergyInput doubled = a;
    for (auto& [th, sz] : doubled) sz *= 2.0;
    require(std::abs(data_energy_j(doubled, beta_only) - 2.0 * data_energy_j(a, beta_only)) <
                1e-12,
            "size homogeneity failed");

    ChunkEnergyInput faster = a;
    for (auto& [th, sz] : faster) th *= 1.7;
    require(data_energy_j(faster, c) < data_energy_j(a, c),
            "energy not decreasing in throughput");
  }

  // 300-segment mid-ladder session with default coefficients.
  auto manifest = std::make_shared<VideoManifest>(generate_manifest("animation", 300, 5));
  SessionConfig cfg;
  cfg.session_segments = 300;
  FixedRungController mid(5);  // 1900 kbps
  const SessionResult r =
      run_session(cfg, preset_trace("lte", 12345), manifest, mid, RewardWeights{},
                  QoECoefficients{}, EnergyCoefficients{}, PlaybackCoefficients{});
  require(r.summary.energy_kj >= 0.5 && r.summary.energy_kj <= 1.5,
          "session energy " + fmt(r.summary.energy_kj) + " kJ outside [0.5, 1.5]");
}

// ---------------------------------------------------------------------------
// Analytic gradients vs central finite differences on random 10->128->128->2
// networks: max relative error < 1e-4 over 100 random coordinates.
void criterion_gradients() {
  Rng rng(13);
  double worst = 0.0;
  for (int net_i = 0; net_i < 4; ++net_i) {
    nn::Mlp net = nn::Mlp::random({10, 128, 128, 2}, rng);
    nn::Matrix x(10, 8);
    for (long i = 0; i < x.rows(); ++i)
      for (long j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform(-1.0, 1.0);
    nn::Vector u(2);
    u << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);

    nn::ForwardCache cache;
    nn::forward(net, x, cache);
    nn::Matrix upstream(2, x.cols());
    for (long c = 0; c < x.cols(); ++c) upstream.col(c) = u;
    const nn::Vector analytic = nn::flatten(nn::backward(net, cache, upstream));

    auto objective = [&]() {
      const nn::Matrix y = nn::forward(net, x);
      double L = 0.0;
      for (long c = 0; c < y.cols(); ++c) L += u.dot(y.col(c));
      return L;
    };

    nn::Vector theta = nn::flatten(net);
    const double h = 1e-5;
    for (int k = 0; k < 25; ++k) {
      const long i = static_cast<long>(rng.uniform() * theta.size());
      nn::Vector tp = theta, tm = theta;
      tp(i) += h;
      tm(i) -= h;
      nn::unflatten(tp, net);
      const double Lp = objective();
      nn::unflatten(tm, net);
      const double Lm = objective();
      nn::unflatten(theta, net);
      const double fd = (Lp - Lm) / (2.0 * h);
      const double rel = std::abs(fd - analytic(i)) / std::max(1e-8, std::abs(fd));
      worst = std::max(worst, rel);
    }
  }
  require(worst < 1e-4, "max gradient relative error " + fmt(worst));
}

// ---------------------------------------------------------------------------
// PER sampling statistics on an 8-element buffer (1e6 draws, 1% absolute,
// chi-square p > 0.01) and sum-tree root consistency under 1e5 random ops.
void criterion_per_stats() {
  PerBuffer buf(8, 0.6);
  Rng rng(17);
  for (int i = 0; i < 8; ++i) {
    Transition t;
    t.r = i;
    buf.insert(t);
  }
  std::vector<std::size_t> idx{0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<double> tds;
  for (int i = 0; i < 8; ++i) tds.push_back(rng.uniform(0.05, 10.0));
  buf.update_priorities(idx, tds);

  double total = 0.0;
  std::vector<double> expected(8);
  for (int i = 0; i < 8; ++i) total += buf.tree().get(i);
  for (int i = 0; i < 8; ++i) expected[i] = buf.tree().get(i) / total;

  std::vector<long> counts(8, 0);
  const long draws = 1000000;
  const long per_batch = 1000;
  for (long b = 0; b < draws / per_batch; ++b) {
    const PerSample s = buf.sample(per_batch, 0.7, rng);
    for (std::size_t i : s.indices) ++counts[i];
  }
  double chi2 = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double freq = static_cast<double>(counts[i]) / draws;
    require(std::abs(freq - expected[i]) < 0.01,
            "PER frequency off by " + fmt(std::abs(freq - expected[i])));
    const double e = expected[i] * draws;
    chi2 += (counts[i] - e) * (counts[i] - e) / e;
  }
  // chi-square critical value at p = 0.01 with 7 degrees of freedom
  require(chi2 < 18.475, "PER chi-square " + fmt(chi2) + " rejects proportionality");

  SumTree tree(1000);
  Rng ops(19);
  for (int op = 0; op < 100000; ++op)
    tree.set(static_cast<std::size_t>(ops.uniform() * 1000), ops.uniform(0.0, 100.0));
  const double rel = std::abs(tree.total() - tree.recompute_total()) /
                     std::max(1e-12, tree.recompute_total());
  require(rel < 1e-6, "sum-tree root drift " + fmt(rel));
}

// ---------------------------------------------------------------------------
// SAC sanity: one-step bandit with reward -(a1 - 0.7)^2; the deterministic
// policy must land in 0.7 +/- 0.05 within 5000 updates.
void criterion_sac_bandit() {
  sac::SacConfig cfg;
  cfg.hidden = {64, 64};
  cfg.batch = 64;
  cfg.actor_lr = 1e-3;
  cfg.critic_lr = 1e-3;
  cfg.seed = 3;
  Rng init_rng(cfg.seed);
  sac::SacLearner learner(cfg, init_rng);
  PerBuffer buffer(1 << 14, cfg.per_alpha, cfg.per_eps);
  Rng rng(5);

  const Observation s = Observation::Zero();
  RewardStandardizer standardizer;  // same reward normalization the trainer applies
  auto bandit_transition = [&](const Action& a) {
    Transition t;
    t.s = s;
    t.s2 = s;
    t.a = Eigen::Vector2d(a.bitrate_frac, a.speed_frac);
    t.r = standardizer.push(-(a.bitrate_frac - 0.7) * (a.bitrate_frac - 0.7));
    t.done = true;
    return t;
  };

  for (int i = 0; i < 512; ++i)
    buffer.insert(bandit_transition(Action(rng.uniform(), rng.uniform())));

  Rng update_rng(7);
  for (int u = 0; u < 5000; ++u) {
    buffer.insert(bandit_transition(sac::policy_sample(learner.params(), s, rng).action));
    learner.update(buffer, 0.6, update_rng);
  }
  const Action a = sac::policy_mean_action(learner.params(), s);
  require(std::abs(a.bitrate_frac - 0.7) <= 0.05,
          "bandit policy landed at " + fmt(a.bitrate_frac));
}

// ---------------------------------------------------------------------------
// RLS predictor: constant convergence, step response, batch oracle.
void criterion_rls() {
  {
    RlsFilter rls;
    for (int i = 0; i < 50; ++i) rls.update(5.0);
    require(std::abs(rls.predict_mbps() - 5.0) / 5.0 < 0.01,
            "constant prediction " + fmt(rls.predict_mbps()));
    for (int i = 0; i < 30; ++i) rls.update(2.0);
    require(std::abs(rls.predict_mbps() - 2.0) / 2.0 < 0.10,
            "step prediction " + fmt(rls.predict_mbps()));
  }
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const int order = 5;
    const double lambda = 0.999, delta = 0.01;
    RlsFilter rls(order, lambda, delta);
    const Eigen::VectorXd w0 = rls.weights();
    std::vector<Eigen::VectorXd> xs;
    std::vector<double> ys;
    Eigen::VectorXd hist;
    const int len = 50;
    for (int i = 0; i < len; ++i) {
      const double y = rng.uniform(0.5, 20.0);
      if (i == 0) hist = Eigen::VectorXd::Constant(order, y);
      xs.push_back(hist);
      ys.push_back(y);
      rls.update(y);
      for (int k = order - 1; k > 0; --k) hist(k) = hist(k - 1);
      hist(0) = y;
    }
    Eigen::MatrixXd A = std::pow(lambda, len) * delta * Eigen::MatrixXd::Identity(order, order);
    Eigen::VectorXd b = std::pow(lambda, len) * delta * w0;
    for (int i = 0; i < len; ++i) {
      const double w = std::pow(lambda, len - 1 - i);
      A += w * xs[i] * xs[i].transpose();
      b += w * ys[i] * xs[i];
    }
    const Eigen::VectorXd w_batch = A.ldlt().solve(b);
    const double rel = (rls.weights() - w_batch).norm() / w_batch.norm();
    require(rel < 1e-6, "RLS/batch divergence " + fmt(rel));
  }
}

// ---------------------------------------------------------------------------
// Ladder mapping brute force: every frac in {0, 0.001, ..., 1} must return
// the index-nearest rung on all three ladders.
void criterion_ladder_mapping() {
  for (const char* genre : {"animation", "movie", "sports"}) {
    const auto ladder = genre_ladder(genre);
    const int L = static_cast<int>(ladder.size());
    for (int k = 0; k <= 1000; ++k) {
      const double frac = k / 1000.0;
      // exhaustive oracle: nearest index, ties resolved upward
      int best = 0;
      double best_dist = 1e300;
      for (int i = 0; i < L; ++i) {
        const double d = std::abs(frac * (L - 1) - i);
        if (d < best_dist - 1e-12 || (std::abs(d - best_dist) <= 1e-12 && i > best)) {
          best = i;
          best_dist = d;
        }
      }
      const int got = map_bitrate(frac, L);
      require(got == best, std::string(genre) + ": frac " + fmt(frac) + " mapped to " +
                               std::to_string(got) + ", oracle " + std::to_string(best));
    }
  }
}

// ---------------------------------------------------------------------------
// Determinism: identical seeds give bit-identical episode logs, training
// logs (W=1), and generated artifacts.
void criterion_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "abrsim_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // generated artifacts
  TraceGenSpec spec = trace_preset("synthetic");
  spec.seed = 99;
  save_network_trace(generate_synthetic_trace(spec), (dir / "t1.csv").string());
  save_network_trace(generate_synthetic_trace(spec), (dir / "t2.csv").string());
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  require(slurp(dir / "t1.csv") == slurp(dir / "t2.csv"), "trace files differ across runs");

  save_manifest(generate_manifest("movie", 60, 4), (dir / "m1.json").string());
  save_manifest(generate_manifest("movie", 60, 4), (dir / "m2.json").string());
  require(slurp(dir / "m1.json") == slurp(dir / "m2.json"), "manifest files differ");

  // episode logs
  auto manifest = std::make_shared<VideoManifest>(generate_manifest("animation", 60, 4));
  SessionConfig cfg;
  cfg.session_segments = 60;
  for (const char* name : {"e1.jsonl", "e2.jsonl"}) {
    ThroughputRuleController rule;
    const SessionResult r =
        run_session(cfg, preset_trace("synthetic", 31), manifest, rule, RewardWeights{},
                    QoECoefficients{}, EnergyCoefficients{}, PlaybackCoefficients{});
    write_episode_jsonl((dir / name).string(), session_records(r));
  }
  require(slurp(dir / "e1.jsonl") == slurp(dir / "e2.jsonl"), "episode logs differ");

  // W=1 training logs
  sac::SacConfig tcfg;
  tcfg.hidden = {16, 16};
  tcfg.batch = 16;
  tcfg.episodes = 2;
  tcfg.start_steps = 20;
  tcfg.update_after = 20;
  tcfg.round_every = 4;
  tcfg.seed = 5;
  sac::WorkerEnvSpec wspec;
  wspec.session.session_segments = 40;
  wspec.manifest = std::make_shared<VideoManifest>(generate_manifest("animation", 40, 4));
  wspec.traces = {preset_trace("synthetic", 31)};
  for (const char* sub : {"w1", "w2"}) {
    fs::create_directories(dir / sub);
    sac::train(tcfg, {wspec}, (dir / sub).string());
  }
  require(slurp(dir / "w1/training_log.csv") == slurp(dir / "w2/training_log.csv"),
          "training logs differ");
  require(slurp(dir / "w1/checkpoint.json") == slurp(dir / "w2/checkpoint.json"),
          "checkpoints differ");
  fs::remove_all(dir);
}

// ---------------------------------------------------------------------------
// End-to-end directional run: train on the mixed pool + animation ladder,
// then on 20 held-out traces require (a) QoE >= throughput rule and
// (b) energy <= fixed-top baseline, across all three ladders zero-shot.
void criterion_e2e() {
  // Training pool: Table-1-style preset mix.
  std::vector<std::shared_ptr<const NetworkTrace>> pool;
  {
    Rng pick(2024);
    const auto& names = trace_preset_names();
    const auto& weights = trace_preset_weights();
    for (int i = 0; i < 30; ++i) {
      double u = pick.uniform(), acc = 0.0;
      std::string name = names.back();
      for (size_t k = 0; k < names.size(); ++k) {
        acc += weights[k];
        if (u < acc) {
          name = names[k];
          break;
        }
      }
      TraceGenSpec spec = trace_preset(name);
      spec.seed = 300 + i;
      pool.push_back(std::make_shared<NetworkTrace>(generate_synthetic_trace(spec)));
    }
  }
  auto train_manifest = std::make_shared<VideoManifest>(generate_manifest("animation", 300, 8));

  sac::SacConfig cfg;
  cfg.episodes = 300;
  cfg.workers = 1;
  cfg.seed = 1;
  cfg.round_every = 4;
  cfg.updates_per_round = 1;
  cfg.start_steps = 3000;
  cfg.update_after = 2000;
  sac::WorkerEnvSpec wspec;
  wspec.session.session_segments = 300;
  wspec.manifest = train_manifest;
  wspec.traces = pool;

  const auto t0 = std::chrono::steady_clock::now();
  const sac::TrainResult trained = sac::train(cfg, {wspec});
  const double train_secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("       e2e: trained %d episodes, %ld updates in %.0f s\n", cfg.episodes,
              trained.total_updates, train_secs);

  // 20 held-out synthetic traces, unseen seeds.
  std::vector<std::shared_ptr<const NetworkTrace>> held_out;
  for (int i = 0; i < 20; ++i) held_out.push_back(preset_trace("synthetic", 5000 + i));

  sac::SacPolicyController sac_ctrl(trained.params);
  ThroughputRuleController rule;
  FixedRungController fixed_max(-1);

  for (const char* genre : {"animation", "movie", "sports"}) {
    auto manifest = std::make_shared<VideoManifest>(generate_manifest(genre, 300, 8));
    double qoe_sac = 0.0, qoe_rule = 0.0, energy_sac = 0.0, energy_max = 0.0;
    for (const auto& trace : held_out) {
      SessionConfig scfg;
      scfg.session_segments = 300;
      const SessionResult rs =
          run_session(scfg, trace, manifest, sac_ctrl, RewardWeights{}, QoECoefficients{},
                      EnergyCoefficients{}, PlaybackCoefficients{});
      const SessionResult rr =
          run_session(scfg, trace, manifest, rule, RewardWeights{}, QoECoefficients{},
                      EnergyCoefficients{}, PlaybackCoefficients{});
      const SessionResult rm =
          run_session(scfg, trace, manifest, fixed_max, RewardWeights{}, QoECoefficients{},
                      EnergyCoefficients{}, PlaybackCoefficients{});
      qoe_sac += rs.summary.qoe;
      qoe_rule += rr.summary.qoe;
      energy_sac += rs.summary.energy_kj;
      energy_max += rm.summary.energy_kj;
    }
    qoe_sac /= 20.0;
    qoe_rule /= 20.0;
    energy_sac /= 20.0;
    energy_max /= 20.0;
    std::printf("       e2e %-9s qoe sac %.2f vs rule %.2f | energy sac %.3f vs fixed:max "
                "%.3f kJ\n",
                genre, qoe_sac, qoe_rule, energy_sac, energy_max);
    require(qoe_sac >= qoe_rule, std::string(genre) + ": trained QoE " + fmt(qoe_sac) +
                                     " below rule " + fmt(qoe_rule));
    require(energy_sac <= energy_max, std::string(genre) + ": trained energy " +
                                          fmt(energy_sac) + " above fixed:max " +
                                          fmt(energy_max));
  }
}

struct Criterion {
  const char* name;
  void (*run)();
};

const Criterion kCriteria[] = {
    {"conservation", criterion_conservation},
    {"qoe_oracle", criterion_qoe_oracle},
    {"energy_model", criterion_energy_model},
    {"gradients", criterion_gradients},
    {"per_stats", criterion_per_stats},
    {"sac_bandit", criterion_sac_bandit},
    {"rls_predictor", criterion_rls},
    {"ladder_mapping", criterion_ladder_mapping},
    {"determinism", criterion_determinism},
    {"e2e", criterion_e2e},
};

}  // namespace

int main(int argc, char** argv) {
  std::string only, skip;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = argv[++i];
    else if (std::strcmp(argv[i], "--skip") == 0 && i + 1 < argc) skip = argv[++i];
    else if (std::strcmp(argv[i], "--list") == 0) {
      for (const auto& c : kCriteria) std::printf("%s\n", c.name);
      return 0;
    } else {
      std::fprintf(stderr, "usage: %s [--only <name>] [--skip <name>] [--list]\n", argv[0]);
      return 2;
    }
  }

  int failures = 0;
  for (const auto& c : kCriteria) {
    if (!only.empty() && only != c.name) continue;
    if (!skip.empty() && skip == c.name) continue;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run();
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::printf("[PASS] %-16s (%.1f s)\n", c.name, secs);
    } catch (const std::exception& e) {
      ++failures;
      std::printf("[FAIL] %-16s %s\n", c.name, e.what());
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
