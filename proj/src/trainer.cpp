#include "abrsim/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "abrsim/reward.hpp"

namespace abrsim::sac {

namespace {

double beta_at(const SacConfig& cfg, long step, long total_steps) {
  if (total_steps <= 0) return 1.0;
  const double frac = std::min(1.0, static_cast<double>(step) / static_cast<double>(total_steps));
  return cfg.per_beta0 + (1.0 - cfg.per_beta0) * frac;
}

LiveSession make_env(const WorkerEnvSpec& spec, size_t episode_ordinal) {
  if (spec.traces.empty()) throw ValidationError("train: worker has an empty trace pool");
  SessionConfig session = spec.session;
  session.seed = spec.session.seed + episode_ordinal;
  return LiveSession(session, spec.traces[episode_ordinal % spec.traces.size()], spec.manifest,
                     spec.reward_weights, spec.energy, spec.playback, spec.predictor);
}

struct SharedState {
  std::mutex mutex;  // guards buffer, standardizer, log, episode counter
  PerBuffer buffer;
  RewardStandardizer standardizer;
  std::vector<EpisodeLogRow> log;
  int next_episode = 0;

  std::mutex snapshot_mutex;
  std::shared_ptr<const PolicyParams> snapshot;

  std::atomic<long> env_steps{0};
  std::atomic<bool> stop{false};
  std::atomic<bool> failed{false};

  std::mutex stats_mutex;
  UpdateStats last_stats;

  explicit SharedState(const SacConfig& cfg)
      : buffer(cfg.buffer_capacity, cfg.per_alpha, cfg.per_eps) {}
};

void worker_loop(const SacConfig& cfg, const WorkerEnvSpec& spec, int worker_id,
                 SharedState& shared) {
  Rng rng(cfg.seed + 1000003ull * static_cast<unsigned long long>(worker_id + 1));
  std::shared_ptr<const PolicyParams> snapshot;
  long local_steps = 0;
  size_t local_episode = 0;

  for (;;) {
    int episode;
    {
      std::lock_guard<std::mutex> lock(shared.mutex);
      if (shared.next_episode >= cfg.episodes || shared.stop.load()) return;
      episode = shared.next_episode++;
    }
    LiveSession env = make_env(spec, local_episode++);
    StepResult sr = env.reset();
    Observation obs = sr.obs;
    double reward_sum = 0.0;
    long reward_n = 0;

    while (!env.done()) {
      if (shared.stop.load()) return;
      if (local_steps % cfg.sync_interval == 0) {
        std::lock_guard<std::mutex> lock(shared.snapshot_mutex);
        snapshot = shared.snapshot;
      }
      Action action;
      const long global_step = shared.env_steps.load(std::memory_order_relaxed);
      if (global_step < cfg.start_steps || !snapshot)
        action = Action(rng.uniform(), rng.uniform());
      else
        action = policy_sample(*snapshot, obs, rng).action;

      StepResult next = env.step(action);
      reward_sum += next.reward;
      ++reward_n;

      Transition t;
      t.s = obs;
      t.a = Eigen::Vector2d(action.bitrate_frac, action.speed_frac);
      t.s2 = next.obs;
      t.done = next.done;
      {
        std::lock_guard<std::mutex> lock(shared.mutex);
        t.r = shared.standardizer.push(next.reward);
        shared.buffer.insert(t);
      }
      obs = next.obs;
      ++local_steps;
      shared.env_steps.fetch_add(1, std::memory_order_relaxed);
    }

    EpisodeLogRow row;
    row.episode = episode;
    row.worker = worker_id;
    row.env_steps = shared.env_steps.load();
    row.mean_reward = reward_n > 0 ? reward_sum / static_cast<double>(reward_n) : 0.0;
    {
      std::lock_guard<std::mutex> s(shared.stats_mutex);
      row.critic_loss = shared.last_stats.critic_loss;
      row.actor_objective = shared.last_stats.actor_objective;
      row.entropy = shared.last_stats.entropy;
    }
    std::lock_guard<std::mutex> lock(shared.mutex);
    shared.log.push_back(row);
  }
}

TrainResult train_sequential(const SacConfig& cfg, const WorkerEnvSpec& spec,
                             long total_steps_planned) {
  Rng init_rng(cfg.seed);
  SacLearner learner(cfg, init_rng);
  Rng act_rng(cfg.seed ^ 0x9E3779B97F4A7C15ull);
  Rng update_rng(cfg.seed ^ 0xD1B54A32D192ED03ull);

  PerBuffer buffer(cfg.buffer_capacity, cfg.per_alpha, cfg.per_eps);
  RewardStandardizer standardizer;

  TrainResult result;
  UpdateStats last_stats;
  long steps = 0, updates = 0;

  for (int episode = 0; episode < cfg.episodes; ++episode) {
    LiveSession env = make_env(spec, static_cast<size_t>(episode));
    StepResult sr = env.reset();
    Observation obs = sr.obs;
    double reward_sum = 0.0;
    long reward_n = 0;

    while (!env.done()) {
      Action action;
      if (steps < cfg.start_steps)
        action = Action(act_rng.uniform(), act_rng.uniform());
      else
        action = policy_sample(learner.params(), obs, act_rng).action;

      StepResult next = env.step(action);
      reward_sum += next.reward;
      ++reward_n;

      Transition t;
      t.s = obs;
      t.a = Eigen::Vector2d(action.bitrate_frac, action.speed_frac);
      t.r = standardizer.push(next.reward);
      t.s2 = next.obs;
      t.done = next.done;
      buffer.insert(t);

      obs = next.obs;
      ++steps;
      if (buffer.size() >= static_cast<size_t>(std::max(cfg.update_after, cfg.batch)) &&
          steps % cfg.round_every == 0) {
        for (int u = 0; u < cfg.updates_per_round; ++u) {
          last_stats = learner.update(buffer, beta_at(cfg, steps, total_steps_planned),
                                      update_rng);
          ++updates;
        }
      }
    }

    EpisodeLogRow row;
    row.episode = episode;
    row.worker = 0;
    row.env_steps = steps;
    row.mean_reward = reward_n > 0 ? reward_sum / static_cast<double>(reward_n) : 0.0;
    row.critic_loss = last_stats.critic_loss;
    row.actor_objective = last_stats.actor_objective;
    row.entropy = last_stats.entropy;
    result.log.push_back(row);
  }

  result.params = learner.params();
  result.total_env_steps = steps;
  result.total_updates = updates;
  return result;
}

TrainResult train_threaded(const SacConfig& cfg, const std::vector<WorkerEnvSpec>& specs,
                           long total_steps_planned) {
  Rng init_rng(cfg.seed);
  SacLearner learner(cfg, init_rng);
  Rng update_rng(cfg.seed ^ 0xD1B54A32D192ED03ull);

  SharedState shared(cfg);
  shared.snapshot = std::make_shared<const PolicyParams>(learner.params());

  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(specs.size());
  for (size_t w = 0; w < specs.size(); ++w) {
    threads.emplace_back([&, w]() {
      try {
        worker_loop(cfg, specs[w], static_cast<int>(w), shared);
      } catch (...) {
        errors[w] = std::current_exception();
        shared.failed.store(true);
        shared.stop.store(true);
      }
    });
  }

  long updates = 0;
  long published_at = 0;
  const long min_fill = std::max<long>(cfg.update_after, cfg.batch);
  std::exception_ptr learner_error;
  try {
    for (;;) {
      const bool workers_done = [&] {
        std::lock_guard<std::mutex> lock(shared.mutex);
        return shared.next_episode >= cfg.episodes &&
               static_cast<long>(shared.log.size()) >= cfg.episodes;
      }();
      if (shared.failed.load()) break;

      const long steps = shared.env_steps.load();
      long due = 0;
      {
        std::lock_guard<std::mutex> lock(shared.mutex);
        if (static_cast<long>(shared.buffer.size()) >= min_fill)
          due = (steps / cfg.round_every) * cfg.updates_per_round;
      }
      if (updates < due) {
        UpdateStats stats;
        {
          std::lock_guard<std::mutex> lock(shared.mutex);
          stats = learner.update(shared.buffer, beta_at(cfg, steps, total_steps_planned),
                                 update_rng);
          ++updates;
        }
        {
          std::lock_guard<std::mutex> s(shared.stats_mutex);
          shared.last_stats = stats;
        }
        if (updates - published_at >= 50) {
          auto snap = std::make_shared<const PolicyParams>(learner.params());
          std::lock_guard<std::mutex> lock(shared.snapshot_mutex);
          shared.snapshot = std::move(snap);
          published_at = updates;
        }
      } else if (workers_done) {
        break;
      } else {
        std::this_thread::sleep_for(std::chrono::microseconds(200));
      }
    }
  } catch (...) {
    learner_error = std::current_exception();
    shared.stop.store(true);
  }
  shared.stop.store(true);
  for (auto& t : threads) t.join();

  if (learner_error) std::rethrow_exception(learner_error);
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  TrainResult result;
  result.params = learner.params();
  result.log = std::move(shared.log);
  std::sort(result.log.begin(), result.log.end(),
            [](const EpisodeLogRow& a, const EpisodeLogRow& b) { return a.episode < b.episode; });
  result.total_env_steps = shared.env_steps.load();
  result.total_updates = updates;
  return result;
}

}  // namespace

std::vector<std::vector<std::shared_ptr<const NetworkTrace>>> partition_traces(
    const std::vector<std::shared_ptr<const NetworkTrace>>& traces, int workers) {
  if (traces.empty()) throw ValidationError("partition_traces: no traces");
  if (workers < 1) throw ValidationError("partition_traces: workers must be >= 1");
  auto sorted = traces;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) {
              return a->mean_bandwidth_mbps() < b->mean_bandwidth_mbps();
            });
  std::vector<std::vector<std::shared_ptr<const NetworkTrace>>> pools(workers);
  // Contiguous bandwidth bands; every pool gets at least one trace.
  for (size_t i = 0; i < sorted.size(); ++i) {
    const size_t pool = std::min<size_t>(i * workers / sorted.size(), workers - 1);
    pools[pool].push_back(sorted[i]);
  }
  for (auto& pool : pools)
    if (pool.empty()) pool = sorted;
  return pools;
}

void write_training_log_csv(const std::string& path, const std::vector<EpisodeLogRow>& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write training log: " + path);
  out << "episode,worker,env_steps,mean_reward,critic_loss,actor_objective,entropy\n";
  char buf[256];
  for (const auto& row : log) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%ld,%.6f,%.6f,%.6f,%.6f\n", row.episode, row.worker,
                  row.env_steps, row.mean_reward, row.critic_loss, row.actor_objective,
                  row.entropy);
    out << buf;
  }
  if (!out) throw IoError("training log write failed: " + path);
}

TrainResult train(const SacConfig& cfg, const std::vector<WorkerEnvSpec>& worker_specs,
                  const std::string& out_dir) {
  cfg.validate();
  if (static_cast<int>(worker_specs.size()) != cfg.workers)
    throw ValidationError("train: need exactly one env spec per worker");
  for (const auto& spec : worker_specs) {
    if (!spec.manifest) throw ValidationError("train: missing manifest");
    if (spec.traces.empty()) throw ValidationError("train: empty trace pool");
  }
  const long total_steps_planned =
      static_cast<long>(cfg.episodes) *
      std::max(1, worker_specs.front().session.session_segments - 1);

  const auto t0 = std::chrono::steady_clock::now();
  TrainResult result = cfg.workers == 1
                           ? train_sequential(cfg, worker_specs.front(), total_steps_planned)
                           : train_threaded(cfg, worker_specs, total_steps_planned);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!out_dir.empty()) {
    const std::string ckpt = out_dir + "/checkpoint.json";
    save_checkpoint(ckpt, result.params, cfg, Rng(cfg.seed).state());
    write_training_log_csv(out_dir + "/training_log.csv", result.log);
    result.checkpoint_path = ckpt;
  }
  return result;
}

}  // namespace abrsim::sac
