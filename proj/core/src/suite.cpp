#include "sitesim/suite.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "sitesim/errors.hpp"

namespace sitesim {

using nlohmann::json;

SuiteReport run_suite(const ScenarioConfig& config, const std::vector<Mode>& modes,
                      size_t n_episodes, unsigned jobs) {
  if (n_episodes == 0) throw ConfigError("run_suite needs at least one episode");
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());

  SuiteReport report;
  report.rows.resize(modes.size() * n_episodes);

  // Work items are (mode, episode); results land in preallocated slots, so
  // the report is identical no matter how many workers ran.
  std::atomic<size_t> next{0};
  const size_t total = report.rows.size();
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
      const size_t mode_idx = i / n_episodes;
      const uint64_t episode = i % n_episodes;
      SuiteRow& row = report.rows[i];
      row.mode = modes[mode_idx];
      row.episode = episode;
      row.metrics = run_episode(config, modes[mode_idx], episode).metrics;
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (size_t m = 0; m < modes.size(); ++m) {
    std::vector<SuiteRow> mode_rows(report.rows.begin() + static_cast<long>(m * n_episodes),
                                    report.rows.begin() + static_cast<long>((m + 1) * n_episodes));
    report.summaries.push_back(summarize(modes[m], mode_rows));
  }
  return report;
}

ModeSummary summarize(Mode mode, const std::vector<SuiteRow>& rows) {
  ModeSummary s;
  s.mode = mode;
  s.episodes = rows.size();
  size_t completed = 0;
  double time_sum = 0.0;
  double uncleared_sum = 0.0;
  for (const SuiteRow& row : rows) {
    const EpisodeMetrics& m = row.metrics;
    if (m.collided) s.collision_rate += 1.0;
    if (m.completed()) {
      completed += 1;
      time_sum += *m.completion_time;
    }
    if (m.timed_out()) s.timeout_rate += 1.0;
    uncleared_sum += m.uncleared;
    s.saw_modifications += m.saw_modifications;
    s.saw_violations += m.saw_violations;
    s.doomed_arbitrations += m.doomed_arbitrations;
  }
  const double n = static_cast<double>(rows.size());
  s.collision_rate /= n;
  s.timeout_rate /= n;
  s.completed_rate = static_cast<double>(completed) / n;
  s.mean_time = completed > 0 ? time_sum / static_cast<double>(completed) : 0.0;
  s.mean_uncleared = uncleared_sum / n;
  return s;
}

namespace {

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

}  // namespace

void write_metrics_csv(const std::filesystem::path& path, const SuiteReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "mode,episode,seed,collided,time_s,uncleared_frac\n";
  for (const SuiteRow& row : report.rows) {
    out << mode_to_string(row.mode) << ',' << row.episode << ','
        << row.metrics.episode_seed << ',' << (row.metrics.collided ? 1 : 0) << ',';
    if (row.metrics.completed()) out << format_double(*row.metrics.completion_time);
    out << ',' << format_double(row.metrics.uncleared) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::string summary_to_json(const SuiteReport& report) {
  json arr = json::array();
  for (const ModeSummary& s : report.summaries) {
    arr.push_back({
        {"mode", mode_to_string(s.mode)},
        {"episodes", s.episodes},
        {"collision_rate", s.collision_rate},
        {"completed_rate", s.completed_rate},
        {"timeout_rate", s.timeout_rate},
        {"mean_time_s", s.mean_time},
        {"mean_uncleared", s.mean_uncleared},
        {"saw_modifications", s.saw_modifications},
        {"saw_violations", s.saw_violations},
        {"doomed_arbitrations", s.doomed_arbitrations},
    });
  }
  return json{{"modes", arr}}.dump(2);
}

void write_summary_json(const std::filesystem::path& path, const SuiteReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << summary_to_json(report) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace sitesim
