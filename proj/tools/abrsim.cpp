// Command-line front door: trace/manifest generation, single-session
// simulation, SAC training, batch evaluation, and report emission.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "abrsim/report.hpp"
#include "abrsim/runconfig.hpp"
#include "abrsim/runner.hpp"
#include "abrsim/trainer.hpp"

namespace fs = std::filesystem;
using namespace abrsim;

namespace {

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, ','))
    if (!part.empty()) out.push_back(part);
  return out;
}

std::vector<std::string> list_trace_files(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ValidationError("not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ValidationError("no .csv traces in " + dir);
  return files;
}

std::vector<std::shared_ptr<const NetworkTrace>> load_traces(const std::string& dir) {
  std::vector<std::shared_ptr<const NetworkTrace>> traces;
  for (const auto& f : list_trace_files(dir))
    traces.push_back(std::make_shared<NetworkTrace>(load_network_trace(f)));
  return traces;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir);
}

int cmd_gen_traces(const std::string& preset, int count, std::uint64_t seed, double duration,
                   const std::string& out_dir) {
  ensure_out_dir(out_dir);
  Rng pick_rng(seed);
  const auto& names = trace_preset_names();
  const auto& weights = trace_preset_weights();
  for (int i = 0; i < count; ++i) {
    std::string name = preset;
    if (preset == "mix") {
      double u = pick_rng.uniform(), acc = 0.0;
      name = names.back();
      for (size_t k = 0; k < names.size(); ++k) {
        acc += weights[k];
        if (u < acc) {
          name = names[k];
          break;
        }
      }
    }
    TraceGenSpec spec = trace_preset(name);
    spec.seed = seed + 7919ull * static_cast<unsigned long long>(i);
    if (duration > 0) spec.duration_s = duration;
    NetworkTrace trace = generate_synthetic_trace(spec);
    char fname[64];
    std::snprintf(fname, sizeof(fname), "trace_%03d_%s.csv", i, name.c_str());
    const std::string path = out_dir + "/" + fname;
    save_network_trace(trace, path);
    std::printf("%s  preset=%s mean=%.3f Mbps samples=%zu duration=%.1fs\n", path.c_str(),
                name.c_str(), trace.mean_bandwidth_mbps(), trace.samples.size(),
                trace.duration_s);
  }
  return 0;
}

int cmd_gen_manifest(const std::string& genre, int segments, std::uint64_t seed,
                     const std::string& out_path) {
  VideoManifest m = generate_manifest(genre, segments, seed);
  save_manifest(m, out_path);
  std::printf("%s  genre=%s segments=%d rungs=%d ladder=[%d..%d] kbps\n", out_path.c_str(),
              genre.c_str(), m.num_segments(), m.num_rungs(), m.min_bitrate_kbps(),
              m.max_bitrate_kbps());
  return 0;
}

int cmd_simulate(RunConfig cfg, const std::string& trace_path) {
  cfg.validate();
  if (cfg.manifest_path.empty()) throw ValidationError("simulate: --manifest is required");
  ensure_out_dir(cfg.out_dir);
  auto trace = std::make_shared<NetworkTrace>(load_network_trace(trace_path));
  auto manifest = std::make_shared<VideoManifest>(load_manifest(cfg.manifest_path));
  auto controller = make_controller(cfg.abr);

  SessionConfig session = cfg.session;
  session.seed = cfg.seed;
  SessionResult result = run_session(session, trace, manifest, *controller, cfg.reward, cfg.qoe,
                                     cfg.energy, cfg.playback, cfg.predictor);

  const auto records = session_records(result);
  write_episode_jsonl(cfg.out_dir + "/episode.jsonl", records);
  write_summary_json(cfg.out_dir + "/summary.json", result.summary, controller->name(),
                     trace->label, cfg.seed);
  write_session_svg(cfg.out_dir + "/session.svg", records, trace.get());
  cfg.write_echo(cfg.out_dir + "/config_used.cfg");

  const auto& s = result.summary;
  std::printf("abr=%s trace=%s qoe=%.2f energy=%.3fkJ eff=%.2f quality=%.2f freezing=%.2fs "
              "latency=%.2fs\n",
              controller->name().c_str(), trace->label.c_str(), s.qoe, s.energy_kj,
              s.energy_efficiency, s.quality_level, s.freezing_s, s.mean_latency_s);
  return 0;
}

int cmd_train(RunConfig cfg) {
  cfg.validate();
  if (cfg.manifest_path.empty()) throw ValidationError("train: --manifest is required");
  if (cfg.traces_dir.empty()) throw ValidationError("train: --traces is required");
  ensure_out_dir(cfg.out_dir);
  auto manifest = std::make_shared<VideoManifest>(load_manifest(cfg.manifest_path));
  auto traces = load_traces(cfg.traces_dir);
  auto pools = sac::partition_traces(traces, cfg.sac.workers);

  std::vector<sac::WorkerEnvSpec> specs(cfg.sac.workers);
  for (int w = 0; w < cfg.sac.workers; ++w) {
    specs[w].session = cfg.session;
    specs[w].session.seed = cfg.seed + w;
    specs[w].reward_weights = cfg.reward;
    specs[w].energy = cfg.energy;
    specs[w].playback = cfg.playback;
    specs[w].predictor = cfg.predictor;
    specs[w].manifest = manifest;
    specs[w].traces = pools[w];
  }
  sac::SacConfig sac_cfg = cfg.sac;
  sac_cfg.seed = cfg.seed;

  sac::TrainResult result = sac::train(sac_cfg, specs, cfg.out_dir);
  cfg.write_echo(cfg.out_dir + "/config_used.cfg");

  // Episodes-to-threshold: first episode whose trailing-20 mean reward
  // reaches 90% of the best trailing-20 mean.
  double best = -1e300;
  std::vector<double> trailing(result.log.size(), 0.0);
  for (size_t i = 0; i < result.log.size(); ++i) {
    double sum = 0.0;
    const size_t lo = i >= 19 ? i - 19 : 0;
    for (size_t k = lo; k <= i; ++k) sum += result.log[k].mean_reward;
    trailing[i] = sum / static_cast<double>(i - lo + 1);
    best = std::max(best, trailing[i]);
  }
  int threshold_episode = -1;
  const double threshold = best >= 0 ? 0.9 * best : best / 0.9;
  for (size_t i = 0; i < trailing.size(); ++i)
    if (trailing[i] >= threshold) {
      threshold_episode = static_cast<int>(i);
      break;
    }

  std::ofstream rep(cfg.out_dir + "/train_report.txt");
  rep << "wall_seconds " << result.wall_seconds << "\n"
      << "episodes " << result.log.size() << "\n"
      << "env_steps " << result.total_env_steps << "\n"
      << "updates " << result.total_updates << "\n"
      << "workers " << sac_cfg.workers << "\n"
      << "episodes_to_threshold " << threshold_episode << "\n";

  std::printf("trained %zu episodes, %ld env steps, %ld updates in %.1fs (W=%d) -> %s\n",
              result.log.size(), result.total_env_steps, result.total_updates,
              result.wall_seconds, sac_cfg.workers, result.checkpoint_path.c_str());
  return 0;
}

int cmd_evaluate(RunConfig cfg, const std::string& abr_list) {
  cfg.validate();
  if (cfg.manifest_path.empty()) throw ValidationError("evaluate: --manifest is required");
  if (cfg.traces_dir.empty()) throw ValidationError("evaluate: --traces is required");
  const auto abr_specs = split_csv_list(abr_list);
  if (abr_specs.empty()) throw ValidationError("evaluate: need at least one controller");
  ensure_out_dir(cfg.out_dir);

  auto manifest = std::make_shared<VideoManifest>(load_manifest(cfg.manifest_path));
  auto traces = load_traces(cfg.traces_dir);

  struct Job {
    std::string abr;
    std::shared_ptr<const NetworkTrace> trace;
  };
  std::vector<Job> jobs;
  for (const auto& abr : abr_specs)
    for (const auto& trace : traces) jobs.push_back({abr, trace});

  std::vector<EvalRow> rows(jobs.size());
  auto run_one = [&](size_t i) {
    EvalRow row;
    row.abr = jobs[i].abr;
    row.trace = jobs[i].trace->label;
    try {
      auto controller = make_controller(jobs[i].abr);
      SessionConfig session = cfg.session;
      session.seed = cfg.seed + i;
      const SessionResult r = run_session(session, jobs[i].trace, manifest, *controller,
                                          cfg.reward, cfg.qoe, cfg.energy, cfg.playback,
                                          cfg.predictor);
      row.abr = controller->name();
      row.summary = r.summary;
    } catch (const std::exception& e) {
      row.error = true;
      row.error_message = e.what();
    }
    rows[i] = std::move(row);
  };

  if (cfg.jobs <= 1) {
    for (size_t i = 0; i < jobs.size(); ++i) run_one(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < cfg.jobs; ++t)
      pool.emplace_back([&]() {
        for (size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) run_one(i);
      });
    for (auto& t : pool) t.join();
  }

  const std::string csv_path = cfg.out_dir + "/evaluation.csv";
  write_evaluation_csv(csv_path, rows);
  cfg.write_echo(cfg.out_dir + "/config_used.cfg");

  for (const auto& agg : aggregate_rows(rows))
    if (agg.trace == "mean")
      std::printf("%-12s qoe=%8.2f energy=%6.3fkJ eff=%8.2f quality=%.2f freezing=%6.2fs "
                  "latency=%5.2fs data=%7.1fMb\n",
                  agg.abr.c_str(), agg.summary.qoe, agg.summary.energy_kj,
                  agg.summary.energy_efficiency, agg.summary.quality_level,
                  agg.summary.freezing_s, agg.summary.mean_latency_s, agg.summary.data_dl_mb);
  std::printf("wrote %s (%zu sessions)\n", csv_path.c_str(), jobs.size());
  return 0;
}

int cmd_report(const std::string& episode_log, const std::string& evaluation_csv,
               const std::string& trace_path, const std::string& out_dir) {
  if (episode_log.empty() && evaluation_csv.empty())
    throw ValidationError("report: need --episode-log or --evaluation");
  if (!episode_log.empty()) {
    ensure_out_dir(out_dir);
    const auto records = read_episode_jsonl(episode_log);
    std::vector<StepOutcome> outcomes;
    outcomes.reserve(records.size());
    for (const auto& r : records) outcomes.push_back(r.outcome);
    const SessionSummary s = summarize(outcomes, QoECoefficients{});
    write_summary_json(out_dir + "/summary.json", s, "episode-log", episode_log, 0);
    std::unique_ptr<NetworkTrace> trace;
    if (!trace_path.empty())
      trace = std::make_unique<NetworkTrace>(load_network_trace(trace_path));
    write_session_svg(out_dir + "/session.svg", records, trace.get());
    std::printf("segments=%d qoe=%.2f energy=%.3fkJ eff=%.2f -> %s/{summary.json,session.svg}\n",
                s.segments, s.qoe, s.energy_kj, s.energy_efficiency, out_dir.c_str());
  }
  if (!evaluation_csv.empty()) {
    std::ifstream in(evaluation_csv);
    if (!in) throw IoError("cannot open evaluation csv: " + evaluation_csv);
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("abr,", 0) == 0 || line.find(",mean,") != std::string::npos ||
          line.find(",std,") != std::string::npos)
        std::printf("%s\n", line.c_str());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven live ABR streaming lab: simulation, training, evaluation"};
  app.require_subcommand(1);
  sac::install_sac_controller();

  std::string config_path, trace_path, preset = "synthetic", genre = "animation";
  std::string abr_list = "fixed:0,rule,meanstd", episode_log, evaluation_csv, out_override;
  std::string traces_dir, manifest_path, abr_spec, checkpoint;
  int count = 20, segments = 300;
  std::uint64_t seed = 0;
  bool seed_set = false, workers_set = false, episodes_set = false;
  int workers = 1, episodes = 300, jobs = 0;
  double duration = 0.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run config file (key = value lines)");
    cmd->add_option("--out", out_override, "output directory");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { seed = s; seed_set = true; }, "master seed");
  };

  auto* gen = app.add_subcommand("gen", "generate traces or a manifest");
  gen->require_subcommand(1);
  auto* gen_traces = gen->add_subcommand("traces", "write synthetic network trace CSV files");
  gen_traces->add_option("--preset", preset, "3g|lte|4g|5g|synthetic|mix")->capture_default_str();
  gen_traces->add_option("--count", count, "number of traces")->capture_default_str();
  gen_traces->add_option("--duration", duration, "trace duration in seconds (0 = preset default)");
  add_common(gen_traces);
  auto* gen_manifest = gen->add_subcommand("manifest", "write a per-title video manifest JSON");
  gen_manifest->add_option("--genre", genre, "animation|movie|sports")->capture_default_str();
  gen_manifest->add_option("--segments", segments, "segment count")->capture_default_str();
  add_common(gen_manifest);

  auto* simulate = app.add_subcommand("simulate", "run one live session under a trace");
  simulate->add_option("--trace", trace_path, "network trace CSV")->required();
  simulate->add_option("--manifest", manifest_path, "manifest JSON");
  simulate->add_option("--abr", abr_spec, "fixed:<rung>|fixed:max|rule|meanstd|sac:<checkpoint>");
  add_common(simulate);

  auto* train = app.add_subcommand("train", "train the SAC agent");
  train->add_option("--traces", traces_dir, "directory of trace CSVs");
  train->add_option("--manifest", manifest_path, "manifest JSON");
  train->add_option_function<int>(
      "--workers", [&](const int& w) { workers = w; workers_set = true; }, "worker count (1-5)");
  train->add_option_function<int>(
      "--episodes", [&](const int& e) { episodes = e; episodes_set = true; }, "episode count");
  add_common(train);

  auto* evaluate = app.add_subcommand("evaluate", "run controllers over a trace directory");
  evaluate->add_option("--traces", traces_dir, "directory of trace CSVs");
  evaluate->add_option("--manifest", manifest_path, "manifest JSON");
  evaluate->add_option("--abr", abr_list, "comma-separated controller specs")
      ->capture_default_str();
  evaluate->add_option("--jobs", jobs, "concurrent sessions (default 1)");
  add_common(evaluate);

  auto* report = app.add_subcommand("report", "emit summary/plots from saved logs");
  report->add_option("--episode-log", episode_log, "episode JSONL from simulate");
  report->add_option("--evaluation", evaluation_csv, "evaluation CSV from evaluate");
  report->add_option("--trace", trace_path, "trace CSV for the bandwidth panel");
  add_common(report);

  try {
    app.parse(argc, argv);

    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
    if (seed_set) cfg.seed = seed;
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (!traces_dir.empty()) cfg.traces_dir = traces_dir;
    if (!manifest_path.empty()) cfg.manifest_path = manifest_path;
    if (!abr_spec.empty()) cfg.abr = abr_spec;
    if (workers_set) cfg.sac.workers = workers;
    if (episodes_set) cfg.sac.episodes = episodes;
    if (jobs > 0) cfg.jobs = jobs;

    if (gen_traces->parsed())
      return cmd_gen_traces(preset, count, cfg.seed, duration, cfg.out_dir);
    if (gen_manifest->parsed()) {
      const std::string out = out_override.empty() ? "manifest.json" : out_override;
      return cmd_gen_manifest(genre, segments, cfg.seed, out);
    }
    if (simulate->parsed()) return cmd_simulate(cfg, trace_path);
    if (train->parsed()) return cmd_train(cfg);
    if (evaluate->parsed()) return cmd_evaluate(cfg, abr_list);
    if (report->parsed()) return cmd_report(episode_log, evaluation_csv, trace_path, cfg.out_dir);
    return 2;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
