#include "sitesim/replay.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sitesim/errors.hpp"
#include "sitesim/serialization.hpp"

namespace sitesim {

using nlohmann::json;

void save_episode_log(const EpisodeLog& log, const std::filesystem::path& json_path) {
  std::filesystem::path grids_path = json_path;
  grids_path.replace_extension(".grids.bin");

  std::ofstream grids(grids_path, std::ios::binary | std::ios::trunc);
  if (!grids) throw IoError("cannot write " + grids_path.string());
  json snapshots = json::array();
  uint64_t offset = 0;
  for (const auto& snap : log.snapshots) {
    std::vector<unsigned char> bytes;
    append_f32le(bytes, snap.grid.data(), snap.grid.size());
    grids.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
    snapshots.push_back({{"step", snap.step}, {"offset", offset}});
    offset += bytes.size();
  }
  if (!grids) throw IoError("write failed for " + grids_path.string());

  json steps = json::array();
  for (const auto& s : log.steps) {
    steps.push_back({s.t, s.dozer.x, s.dozer.y, s.dozer.heading, s.dumper.x, s.dumper.y,
                     s.dumper.heading});
  }
  json plans = json::array();
  for (const auto& p : log.plans) {
    json wps = json::array();
    for (const Waypoint& wp : p.trajectory.waypoints()) wps.push_back({wp.x, wp.y, wp.t});
    plans.push_back({{"step", p.step},
                     {"agent", p.agent == AgentKind::Dozer ? "dozer" : "dumper"},
                     {"waypoints", wps}});
  }

  const json j = {
      {"map_width", log.map_width},
      {"map_height", log.map_height},
      {"cell_size", log.cell_size},
      {"grids_file", grids_path.filename().string()},
      {"snapshot_stride", log.snapshot_stride},
      {"snapshots", snapshots},
      {"steps", steps},
      {"plans", plans},
  };
  std::ofstream out(json_path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + json_path.string());
  out << j.dump() << '\n';
  if (!out) throw IoError("write failed for " + json_path.string());
}

EpisodeLog load_episode_log(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw IoError("cannot open " + json_path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("bad episode log " + json_path.string() + ": " + e.what());
  }

  EpisodeLog log;
  log.map_width = j.at("map_width").get<size_t>();
  log.map_height = j.at("map_height").get<size_t>();
  log.cell_size = j.at("cell_size").get<double>();
  log.snapshot_stride = j.at("snapshot_stride").get<size_t>();

  for (const auto& s : j.at("steps")) {
    EpisodeLog::Step step;
    step.t = s.at(0).get<double>();
    step.dozer = {s.at(1).get<double>(), s.at(2).get<double>(), s.at(3).get<double>(), step.t};
    step.dumper = {s.at(4).get<double>(), s.at(5).get<double>(), s.at(6).get<double>(), step.t};
    log.steps.push_back(step);
  }
  for (const auto& p : j.at("plans")) {
    EpisodeLog::Plan plan;
    plan.step = p.at("step").get<size_t>();
    plan.agent = p.at("agent").get<std::string>() == "dozer" ? AgentKind::Dozer
                                                             : AgentKind::Dumper;
    for (const auto& wp : p.at("waypoints"))
      plan.trajectory.append(
          {wp.at(0).get<float>(), wp.at(1).get<float>(), wp.at(2).get<float>()});
    log.plans.push_back(std::move(plan));
  }

  const std::filesystem::path grids_path =
      json_path.parent_path() / j.at("grids_file").get<std::string>();
  const std::vector<float> all = read_f32_grid(grids_path);
  const size_t cells = log.map_width * log.map_height;
  for (const auto& s : j.at("snapshots")) {
    EpisodeLog::Snapshot snap;
    snap.step = s.at("step").get<size_t>();
    const size_t start = s.at("offset").get<size_t>() / 4;
    if (start + cells > all.size())
      throw IoError("snapshot offset out of range in " + grids_path.string());
    snap.grid.assign(all.begin() + static_cast<long>(start),
                     all.begin() + static_cast<long>(start + cells));
    log.snapshots.push_back(std::move(snap));
  }
  return log;
}

namespace {

void fill_rect(std::vector<uint8_t>& px, size_t w, size_t h, double cell,
               const OrientedRect& rect, uint8_t value) {
  double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
  for (const Vec2& p : rect.corners()) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const long c0 = std::max(0L, static_cast<long>(std::floor(min_x / cell)));
  const long c1 = std::min(static_cast<long>(w) - 1, static_cast<long>(std::floor(max_x / cell)));
  const long r0 = std::max(0L, static_cast<long>(std::floor(min_y / cell)));
  const long r1 = std::min(static_cast<long>(h) - 1, static_cast<long>(std::floor(max_y / cell)));
  for (long r = r0; r <= r1; ++r) {
    for (long c = c0; c <= c1; ++c) {
      const Vec2 center{(static_cast<double>(c) + 0.5) * cell,
                        (static_cast<double>(r) + 0.5) * cell};
      if (rect.contains(center)) px[static_cast<size_t>(r) * w + static_cast<size_t>(c)] = value;
    }
  }
}

void dot(std::vector<uint8_t>& px, size_t w, size_t h, double cell, const Vec2& p,
         uint8_t value) {
  const long c = static_cast<long>(std::floor(p.x / cell));
  const long r = static_cast<long>(std::floor(p.y / cell));
  if (c < 0 || r < 0 || c >= static_cast<long>(w) || r >= static_cast<long>(h)) return;
  px[static_cast<size_t>(r) * w + static_cast<size_t>(c)] = value;
}

}  // namespace

size_t emit_replay(const EpisodeLog& log, const std::filesystem::path& out_dir,
                   size_t stride, const AgentSpec& dozer_spec,
                   const AgentSpec& dumper_spec) {
  if (stride == 0) throw ConfigError("replay stride must be > 0");
  if (log.steps.empty()) return 0;

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  const size_t w = log.map_width;
  const size_t h = log.map_height;

  // Height scale from the tallest snapshot cell so frames share one ramp.
  double h_max = 1.0;
  for (const auto& snap : log.snapshots)
    for (float v : snap.grid) h_max = std::max(h_max, static_cast<double>(v));

  size_t frames = 0;
  for (size_t idx = 0; idx < log.steps.size(); idx += stride) {
    std::vector<uint8_t> px(w * h, 20);

    const EpisodeLog::Snapshot* base = nullptr;
    for (const auto& snap : log.snapshots) {
      if (snap.step <= idx) base = &snap;
    }
    if (base != nullptr) {
      for (size_t i = 0; i < px.size() && i < base->grid.size(); ++i) {
        const double v = std::clamp(static_cast<double>(base->grid[i]) / h_max, 0.0, 1.0);
        px[i] = static_cast<uint8_t>(20.0 + 160.0 * v);
      }
    }

    const EpisodeLog::Plan* dozer_plan = nullptr;
    const EpisodeLog::Plan* dumper_plan = nullptr;
    for (const auto& plan : log.plans) {
      if (plan.step > idx) break;
      (plan.agent == AgentKind::Dozer ? dozer_plan : dumper_plan) = &plan;
    }
    for (const EpisodeLog::Plan* plan : {dozer_plan, dumper_plan}) {
      if (plan == nullptr) continue;
      for (const Waypoint& wp : plan->trajectory.waypoints())
        dot(px, w, h, log.cell_size, {wp.x, wp.y},
            plan->agent == AgentKind::Dozer ? 220 : 200);
    }

    const EpisodeLog::Step& s = log.steps[idx];
    fill_rect(px, w, h, log.cell_size, footprint(s.dozer, dozer_spec), 255);
    fill_rect(px, w, h, log.cell_size, footprint(s.dumper, dumper_spec), 240);

    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06zu.pgm", frames);
    write_pgm(out_dir / name, w, h, px);
    frames += 1;
  }
  return frames;
}

}  // namespace sitesim
