#include "sitesim/serialization.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sitesim/errors.hpp"

namespace sitesim {

using nlohmann::json;

namespace {

void pack_f32le(const float* data, size_t count, std::vector<unsigned char>& out) {
  out.reserve(out.size() + count * 4);
  for (size_t i = 0; i < count; ++i) {
    uint32_t bits;
    std::memcpy(&bits, &data[i], 4);
    if constexpr (std::endian::native == std::endian::big) {
      bits = __builtin_bswap32(bits);
    }
    out.push_back(static_cast<unsigned char>(bits & 0xff));
    out.push_back(static_cast<unsigned char>((bits >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>((bits >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((bits >> 24) & 0xff));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const void* data, size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw IoError("write failed for " + path.string());
}

json waypoints_json(const TimedTrajectory& traj) {
  json arr = json::array();
  for (const Waypoint& wp : traj.waypoints()) arr.push_back({wp.x, wp.y, wp.t});
  return arr;
}

TimedTrajectory waypoints_from_json(const json& arr) {
  TimedTrajectory out;
  for (const auto& wp : arr) {
    out.append({wp.at(0).get<float>(), wp.at(1).get<float>(), wp.at(2).get<float>()});
  }
  return out;
}

}  // namespace

void write_f32_grid(const std::filesystem::path& path, const float* data, size_t count) {
  std::vector<unsigned char> bytes;
  pack_f32le(data, count, bytes);
  write_file(path, bytes.data(), bytes.size());
}

std::vector<float> read_f32_grid(const std::filesystem::path& path) {
  const std::string raw = read_file(path);
  if (raw.size() % 4 != 0) throw IoError("grid size not a multiple of 4: " + path.string());
  std::vector<float> out(raw.size() / 4);
  for (size_t i = 0; i < out.size(); ++i) {
    uint32_t bits = static_cast<unsigned char>(raw[i * 4]) |
                    (static_cast<uint32_t>(static_cast<unsigned char>(raw[i * 4 + 1])) << 8) |
                    (static_cast<uint32_t>(static_cast<unsigned char>(raw[i * 4 + 2])) << 16) |
                    (static_cast<uint32_t>(static_cast<unsigned char>(raw[i * 4 + 3])) << 24);
    std::memcpy(&out[i], &bits, 4);
  }
  return out;
}

void append_f32le(std::vector<unsigned char>& out, const float* data, size_t count) {
  pack_f32le(data, count, out);
}

void save_height_map(const HeightMap& map, const std::filesystem::path& prefix) {
  std::vector<float> grid(map.heights().size());
  for (size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<float>(map.heights()[i]);
  std::filesystem::path grid_path = prefix;
  grid_path += ".f32";
  write_f32_grid(grid_path, grid.data(), grid.size());

  const json sidecar = {
      {"width_cells", map.width_cells()},
      {"height_cells", map.height_cells()},
      {"cell_size", map.cell_size()},
      {"origin", {map.origin().x, map.origin().y}},
  };
  std::filesystem::path meta_path = prefix;
  meta_path += ".json";
  const std::string text = sidecar.dump(2) + "\n";
  write_file(meta_path, text.data(), text.size());
}

HeightMap load_height_map(const std::filesystem::path& prefix) {
  std::filesystem::path meta_path = prefix;
  meta_path += ".json";
  json sidecar;
  try {
    sidecar = json::parse(read_file(meta_path));
  } catch (const json::exception& e) {
    throw IoError("bad sidecar " + meta_path.string() + ": " + e.what());
  }
  HeightMap map(sidecar.at("width_cells").get<size_t>(),
                sidecar.at("height_cells").get<size_t>(),
                sidecar.at("cell_size").get<double>(),
                {sidecar.at("origin").at(0).get<double>(),
                 sidecar.at("origin").at(1).get<double>()});
  std::filesystem::path grid_path = prefix;
  grid_path += ".f32";
  const std::vector<float> grid = read_f32_grid(grid_path);
  if (grid.size() != map.width_cells() * map.height_cells())
    throw IoError("grid length mismatch in " + grid_path.string());
  for (size_t r = 0; r < map.height_cells(); ++r)
    for (size_t c = 0; c < map.width_cells(); ++c)
      map.at(c, r) = grid[r * map.width_cells() + c];
  return map;
}

void save_observation(const Observation& obs, const std::filesystem::path& prefix) {
  std::filesystem::path grid_path = prefix;
  grid_path += ".f32";
  write_f32_grid(grid_path, obs.grid.data(), obs.grid.size());
  const json sidecar = {
      {"width_cells", kObsSide},
      {"height_cells", kObsSide},
      {"cell_size", obs.resolution},
      {"origin", {obs.window_origin.x, obs.window_origin.y}},
      {"frame", obs.frame == ObservationFrame::DozerLocal ? "dozer_local" : "dumper_global"},
  };
  std::filesystem::path meta_path = prefix;
  meta_path += ".json";
  const std::string text = sidecar.dump(2) + "\n";
  write_file(meta_path, text.data(), text.size());
}

std::string trajectory_to_json(const TimedTrajectory& traj) {
  return waypoints_json(traj).dump();
}

TimedTrajectory trajectory_from_json(const std::string& text) {
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("bad trajectory JSON: ") + e.what());
  }
  if (parsed.is_object() && parsed.contains("waypoints")) parsed = parsed["waypoints"];
  if (!parsed.is_array()) throw IoError("trajectory JSON must be an array of [x, y, t]");
  return waypoints_from_json(parsed);
}

TimedTrajectory load_trajectory(const std::filesystem::path& path) {
  return trajectory_from_json(read_file(path));
}

std::string message_to_json(const TrajectoryMessage& msg) {
  json arr = json::array();
  for (const Waypoint& wp : msg.trajectory) arr.push_back({wp.x, wp.y, wp.t});
  const json j = {
      {"agent_id", msg.agent_id},
      {"kind", msg.kind == AgentKind::Dozer ? "dozer" : "dumper"},
      {"plan_epoch", msg.plan_epoch},
      {"waypoints", arr},
  };
  return j.dump();
}

TrajectoryMessage message_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("bad message JSON: ") + e.what());
  }
  TrajectoryMessage msg;
  msg.agent_id = j.at("agent_id").get<std::string>();
  msg.kind = j.at("kind").get<std::string>() == "dozer" ? AgentKind::Dozer
                                                        : AgentKind::Dumper;
  msg.plan_epoch = j.at("plan_epoch").get<uint64_t>();
  const json& arr = j.at("waypoints");
  if (arr.size() != kTrajectoryCapacity)
    throw IoError("message waypoint array must have the full capacity");
  for (size_t i = 0; i < kTrajectoryCapacity; ++i) {
    msg.trajectory[i] = {arr[i].at(0).get<float>(), arr[i].at(1).get<float>(),
                         arr[i].at(2).get<float>()};
  }
  return msg;
}

void save_site_state(const SiteState& state, const std::filesystem::path& prefix) {
  std::filesystem::path map_prefix = prefix;
  map_prefix += "_map";
  save_height_map(state.map, map_prefix);

  json dumps = json::array();
  for (const Vec2& p : state.route.dump_points) dumps.push_back({p.x, p.y});
  const json header = {
      {"dozer", {state.dozer.x, state.dozer.y, state.dozer.heading, state.dozer.t}},
      {"dumper", {state.dumper.x, state.dumper.y, state.dumper.heading, state.dumper.t}},
      {"dumper_load", state.dumper_load},
      {"clock", state.clock},
      {"target_height", state.target_height},
      {"loading_point", {state.route.loading_point.x, state.route.loading_point.y}},
      {"dump_points", dumps},
      {"next_index", state.route.next_index},
      {"cleared_volume", state.cleared_volume},
      {"total_dumped", state.total_dumped},
      {"initial_above_target", state.initial_above_target},
  };
  std::filesystem::path header_path = prefix;
  header_path += "_state.json";
  const std::string text = header.dump(2) + "\n";
  write_file(header_path, text.data(), text.size());
}

SiteState load_site_state(const std::filesystem::path& prefix) {
  SiteState state;
  std::filesystem::path map_prefix = prefix;
  map_prefix += "_map";
  state.map = load_height_map(map_prefix);

  std::filesystem::path header_path = prefix;
  header_path += "_state.json";
  json header;
  try {
    header = json::parse(read_file(header_path));
  } catch (const json::exception& e) {
    throw IoError("bad state header " + header_path.string() + ": " + e.what());
  }
  auto pose = [](const json& j) {
    return Pose{j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
                j.at(3).get<double>()};
  };
  state.dozer = pose(header.at("dozer"));
  state.dumper = pose(header.at("dumper"));
  state.dumper_load = header.at("dumper_load").get<double>();
  state.clock = header.at("clock").get<double>();
  state.target_height = header.at("target_height").get<double>();
  state.route.loading_point = {header.at("loading_point").at(0).get<double>(),
                               header.at("loading_point").at(1).get<double>()};
  for (const auto& p : header.at("dump_points"))
    state.route.dump_points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  state.route.next_index = header.at("next_index").get<size_t>();
  state.cleared_volume = header.at("cleared_volume").get<double>();
  state.total_dumped = header.at("total_dumped").get<double>();
  state.initial_above_target = header.at("initial_above_target").get<double>();
  state.grading_boundary =
      Polygon::rectangle(state.map.origin().x, state.map.origin().y,
                         state.map.origin().x + state.map.world_width(),
                         state.map.origin().y + state.map.world_height());
  state.recompute_map_volume();
  return state;
}

void write_pgm(const std::filesystem::path& path, size_t width, size_t height,
               const std::vector<uint8_t>& pixels) {
  if (pixels.size() != width * height) throw IoError("pgm pixel count mismatch");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace sitesim
