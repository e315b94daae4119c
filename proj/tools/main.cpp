// sitesim command-line interface: seeded simulation runs, the paired-mode
// benchmark suite, behavior-cloning dataset export, trajectory loss
// evaluation, and replay-frame rendering.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "sitesim/dataset.hpp"
#include "sitesim/losses.hpp"
#include "sitesim/replay.hpp"
#include "sitesim/serialization.hpp"
#include "sitesim/suite.hpp"

namespace {

using namespace sitesim;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

ScenarioConfig load_config(const std::string& path) {
  if (path.empty()) return ScenarioConfig{};
  return config_from_json_file(path);
}

std::vector<Mode> all_modes() {
  return {Mode::DozerOnly, Mode::DumperOnly, Mode::Uncoordinated,
          Mode::Saw,       Mode::SawLocNoise, Mode::SawLocAware};
}

int cmd_simulate(const std::string& config_path, const std::string& mode_name,
                 size_t episodes, uint64_t seed, bool seed_set,
                 const std::string& metrics_path, const std::string& summary_path,
                 const std::string& log_path, size_t log_episode, unsigned jobs) {
  ScenarioConfig config = load_config(config_path);
  if (!mode_name.empty()) config.mode = mode_from_string(mode_name);
  if (seed_set) config.seed = seed;

  const SuiteReport report = run_suite(config, {config.mode}, episodes, jobs);
  if (!metrics_path.empty()) write_metrics_csv(metrics_path, report);
  if (!summary_path.empty()) write_summary_json(summary_path, report);

  if (!log_path.empty()) {
    EpisodeLog log;
    EpisodeOptions options;
    options.log = &log;
    run_episode(config, config.mode, log_episode, options);
    save_episode_log(log, log_path);
  }

  std::cout << summary_to_json(report) << std::endl;
  return kExitOk;
}

int cmd_suite(const std::string& config_path, size_t episodes,
              const std::string& out_dir, unsigned jobs) {
  const ScenarioConfig config = load_config(config_path);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

  const SuiteReport report = run_suite(config, all_modes(), episodes, jobs);
  write_metrics_csv(std::filesystem::path(out_dir) / "metrics.csv", report);
  write_summary_json(std::filesystem::path(out_dir) / "summary.json", report);
  std::cout << summary_to_json(report) << std::endl;
  return kExitOk;
}

int cmd_export_dataset(const std::string& config_path, size_t episodes,
                       const std::string& out_dir) {
  const ScenarioConfig config = load_config(config_path);
  const DatasetManifest manifest = export_dataset(config, episodes, out_dir);
  const json summary = {
      {"episodes", manifest.episodes},
      {"records", manifest.records},
      {"skipped_doomed", manifest.skipped_doomed},
      {"out_dir", out_dir},
  };
  std::cout << summary.dump(2) << std::endl;
  return kExitOk;
}

int cmd_eval_loss(const std::string& pred_path, const std::string& ref_path,
                  const std::string& weights_path) {
  const TimedTrajectory pred = load_trajectory(pred_path);
  const TimedTrajectory ref = load_trajectory(ref_path);

  LossWeights weights;
  if (!weights_path.empty()) {
    std::ifstream in(weights_path);
    if (!in) throw IoError("cannot open " + weights_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad weights JSON: ") + e.what());
    }
    if (j.contains("lambda_ca")) weights.lambda_ca = j["lambda_ca"].get<double>();
    if (j.contains("lambda_saw")) weights.lambda_saw = j["lambda_saw"].get<double>();
    if (j.contains("lambda_token")) weights.lambda_token = j["lambda_token"].get<double>();
    if (j.contains("lambda_done")) weights.lambda_done = j["lambda_done"].get<double>();
  }

  if (pred.size() != ref.size())
    throw ConfigError("pred and ref trajectories must have equal lengths");

  const AgentSpecs specs;
  const SawParams saw;
  LossComponents components;
  components.saw = saw_loss(pred, ref);
  components.ca = ca_loss(pred, ref, specs, saw);

  // Token loss against the reference's end-of-leg labels, assuming the
  // prediction places its token where its own valid length ends.
  TokenPrediction token;
  token.label = end_of_leg_mask(ref);
  const auto pred_mask = end_of_leg_mask(pred);
  for (size_t i = 0; i < kTrajectoryCapacity; ++i)
    token.probability[i] = pred_mask[i] ? 1.0 : 0.0;
  token.clamp();
  components.token = token_loss(token);

  const json report = {
      {"l2", l2_loss(pred, ref)},
      {"saw", components.saw},
      {"ca", components.ca},
      {"token", components.token},
      {"done", components.done},
      {"combined", combined_loss(components, weights)},
      {"weights",
       {{"lambda_ca", weights.lambda_ca},
        {"lambda_saw", weights.lambda_saw},
        {"lambda_token", weights.lambda_token},
        {"lambda_done", weights.lambda_done}}},
  };
  std::cout << report.dump(2) << std::endl;
  return kExitOk;
}

int cmd_replay(const std::string& log_path, const std::string& out_dir, size_t stride) {
  const EpisodeLog log = load_episode_log(log_path);
  const size_t frames = emit_replay(log, out_dir, stride);
  std::cout << json{{"frames", frames}, {"out_dir", out_dir}}.dump(2) << std::endl;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sitesim - deterministic dozer/dumper construction-site simulator"};
  app.require_subcommand(1);

  std::string config_path, mode_name, metrics_path, summary_path, log_path;
  std::string out_dir, pred_path, ref_path, weights_path;
  size_t episodes = 1, stride = 10, log_episode = 0;
  uint64_t seed = 0;
  unsigned jobs = 0;

  auto* simulate = app.add_subcommand("simulate", "Run one mode over seeded episodes");
  simulate->add_option("--config", config_path, "Scenario config JSON");
  simulate->add_option("--mode", mode_name,
                       "dozer_only|dumper_only|uncoordinated|saw|saw_loc_noise|saw_loc_aware");
  simulate->add_option("--episodes", episodes, "Number of episodes")->default_val(1);
  auto* seed_opt = simulate->add_option("--seed", seed, "Root seed override");
  simulate->add_option("--metrics", metrics_path, "Per-episode CSV output");
  simulate->add_option("--summary", summary_path, "Summary JSON output");
  simulate->add_option("--log", log_path, "Episode log JSON output (for replay)");
  simulate->add_option("--log-episode", log_episode, "Which episode to log")->default_val(0);
  simulate->add_option("--jobs", jobs, "Worker threads (0 = hardware)")->default_val(0);

  auto* suite = app.add_subcommand("suite", "Run all six modes over paired scenarios");
  suite->add_option("--config", config_path, "Scenario config JSON");
  suite->add_option("--episodes", episodes, "Episodes per mode")->default_val(1);
  suite->add_option("--out", out_dir, "Output directory")->required();
  suite->add_option("--jobs", jobs, "Worker threads (0 = hardware)")->default_val(0);

  auto* exporter = app.add_subcommand("export-dataset", "Write the behavior-cloning dataset");
  exporter->add_option("--config", config_path, "Scenario config JSON");
  exporter->add_option("--episodes", episodes, "Number of episodes")->default_val(1);
  exporter->add_option("--out", out_dir, "Output directory")->required();

  auto* eval = app.add_subcommand("eval-loss", "Score a predicted trajectory against a reference");
  eval->add_option("--pred", pred_path, "Predicted trajectory JSON")->required();
  eval->add_option("--ref", ref_path, "Reference trajectory JSON")->required();
  eval->add_option("--weights", weights_path, "Loss weights JSON");

  auto* replay = app.add_subcommand("replay", "Render PGM frames from an episode log");
  replay->add_option("--log", log_path, "Episode log JSON")->required();
  replay->add_option("--out", out_dir, "Frame output directory")->required();
  replay->add_option("--stride", stride, "Logged steps per frame")->default_val(10);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (simulate->parsed())
      return cmd_simulate(config_path, mode_name, episodes, seed, seed_opt->count() > 0,
                          metrics_path, summary_path, log_path, log_episode, jobs);
    if (suite->parsed()) return cmd_suite(config_path, episodes, out_dir, jobs);
    if (exporter->parsed()) return cmd_export_dataset(config_path, episodes, out_dir);
    if (eval->parsed()) return cmd_eval_loss(pred_path, ref_path, weights_path);
    if (replay->parsed()) return cmd_replay(log_path, out_dir, stride);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << std::endl;
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitError;
  }
  return kExitError;
}
