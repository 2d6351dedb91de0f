#pragma once

#include <optional>
#include <string>
#include <vector>

#include "abrsim/reward.hpp"
#include "abrsim/runner.hpp"
#include "abrsim/trace.hpp"

namespace abrsim {

/// One line of the per-step episode log (JSON lines, schema v1).
struct EpisodeRecord {
  StepOutcome outcome;
  double buffer_s = 0.0;
  double wall_s = 0.0;
  double reward = 0.0;
};

std::vector<EpisodeRecord> session_records(const SessionResult& result);

void write_episode_jsonl(const std::string& path, const std::vector<EpisodeRecord>& records);
std::vector<EpisodeRecord> read_episode_jsonl(const std::string& path);

void write_summary_json(const std::string& path, const SessionSummary& summary,
                        const std::string& abr, const std::string& trace_label,
                        std::uint64_t seed);

struct EvalRow {
  std::string abr;
  std::string trace;
  SessionSummary summary;
  bool error = false;
  std::string error_message;
};

/// Fixed column set mirroring the session metric table.
std::string evaluation_csv_header();
std::string evaluation_csv_row(const EvalRow& row);
/// Per-session rows followed by per-controller mean and std rows.
void write_evaluation_csv(const std::string& path, const std::vector<EvalRow>& rows);
std::vector<EvalRow> aggregate_rows(const std::vector<EvalRow>& rows);

/// Self-contained five-panel session plot: bandwidth, bitrate, buffer,
/// latency, VMAF against wall time.
std::string render_session_svg(const std::vector<EpisodeRecord>& records,
                               const NetworkTrace* trace);
void write_session_svg(const std::string& path, const std::vector<EpisodeRecord>& records,
                       const NetworkTrace* trace);

}  // namespace abrsim
