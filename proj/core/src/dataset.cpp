#include "sitesim/dataset.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "sitesim/errors.hpp"
#include "sitesim/serialization.hpp"

namespace sitesim {

using nlohmann::json;

namespace {

json encoded_json(const EncodedTrajectory& enc) {
  json arr = json::array();
  for (const Waypoint& wp : enc) arr.push_back({wp.x, wp.y, wp.t});
  return arr;
}

}  // namespace

DatasetManifest export_dataset(const ScenarioConfig& config, size_t n_episodes,
                               const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  DatasetManifest manifest;
  manifest.episodes = n_episodes;

  std::ofstream grids(out_dir / manifest.grids_file, std::ios::binary | std::ios::trunc);
  if (!grids) throw IoError("cannot write " + (out_dir / manifest.grids_file).string());
  std::ofstream index(out_dir / manifest.index_file, std::ios::trunc);
  if (!index) throw IoError("cannot write " + (out_dir / manifest.index_file).string());

  uint64_t grid_offset = 0;
  auto write_grid = [&](const Observation& obs) {
    std::vector<unsigned char> bytes;
    append_f32le(bytes, obs.grid.data(), obs.grid.size());
    grids.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
    const uint64_t at = grid_offset;
    grid_offset += bytes.size();
    return at;
  };

  PlanSink sink = [&](const PlanRecord& record) {
    if (record.doomed) {
      manifest.skipped_doomed += 1;
      return;
    }
    const uint64_t clean_at = write_grid(record.clean_obs);
    const uint64_t noisy_at = write_grid(record.noisy_obs);
    json mask = json::array();
    for (uint8_t b : record.end_mask) mask.push_back(static_cast<int>(b));
    const json row = {
        {"episode", record.episode},
        {"step", record.step_index},
        {"agent", record.agent == AgentKind::Dozer ? "dozer" : "dumper"},
        {"clean_grid_offset", clean_at},
        {"noisy_grid_offset", noisy_at},
        {"resolution", record.clean_obs.resolution},
        {"true_pose",
         {record.true_pose.x, record.true_pose.y, record.true_pose.heading,
          record.true_pose.t}},
        {"measured_pose",
         {record.measured_pose.x, record.measured_pose.y, record.measured_pose.heading,
          record.measured_pose.t}},
        {"expert_traj", encoded_json(record.expert_trajectory)},
        {"modified_traj", encoded_json(record.modified_trajectory)},
        {"end_mask", mask},
    };
    index << row.dump() << '\n';
    manifest.records += 1;
  };

  for (uint64_t episode = 0; episode < n_episodes; ++episode) {
    EpisodeOptions options;
    options.plan_sink = sink;
    run_episode(config, config.mode, episode, options);
  }

  grids.flush();
  index.flush();
  if (!grids || !index) throw IoError("dataset write failed under " + out_dir.string());

  const json mj = {
      {"format_version", manifest.format_version},
      {"episodes", manifest.episodes},
      {"records", manifest.records},
      {"skipped_doomed", manifest.skipped_doomed},
      {"grids_file", manifest.grids_file},
      {"index_file", manifest.index_file},
      {"grid_side", kObsSide},
      {"trajectory_capacity", kTrajectoryCapacity},
      {"config", json::parse(config_to_json(config))},
  };
  std::ofstream mf(out_dir / "manifest.json", std::ios::trunc);
  if (!mf) throw IoError("cannot write " + (out_dir / "manifest.json").string());
  mf << mj.dump(2) << '\n';
  if (!mf) throw IoError("write failed for " + (out_dir / "manifest.json").string());
  return manifest;
}

}  // namespace sitesim
