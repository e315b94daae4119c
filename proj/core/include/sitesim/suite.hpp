#pragma once

#include <filesystem>
#include <vector>

#include "sitesim/episode.hpp"

namespace sitesim {

struct SuiteRow {
  Mode mode;
  uint64_t episode = 0;
  EpisodeMetrics metrics;
};

struct ModeSummary {
  Mode mode;
  size_t episodes = 0;
  double collision_rate = 0.0;  // fraction of episodes
  double completed_rate = 0.0;
  double timeout_rate = 0.0;
  double mean_time = 0.0;       // s, over completed episodes (0 when none)
  double mean_uncleared = 0.0;  // over all episodes
  size_t saw_modifications = 0;
  size_t saw_violations = 0;
  size_t doomed_arbitrations = 0;
};

struct SuiteReport {
  std::vector<SuiteRow> rows;  // ordered by (mode, episode)
  std::vector<ModeSummary> summaries;
};

/// Runs every requested mode over the identical scenario sequence
/// (paired comparison); episodes execute in parallel but results are keyed by
/// (mode, episode), so the report is deterministic given config.seed.
SuiteReport run_suite(const ScenarioConfig& config, const std::vector<Mode>& modes,
                      size_t n_episodes, unsigned jobs = 0);

ModeSummary summarize(Mode mode, const std::vector<SuiteRow>& rows);

/// CSV schema: mode,episode,seed,collided,time_s,uncleared_frac
/// (time_s empty for collided/timeout episodes).
void write_metrics_csv(const std::filesystem::path& path, const SuiteReport& report);
void write_summary_json(const std::filesystem::path& path, const SuiteReport& report);
std::string summary_to_json(const SuiteReport& report);

}  // namespace sitesim
