#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sitesim/coordination.hpp"
#include "sitesim/height_map.hpp"
#include "sitesim/observation.hpp"
#include "sitesim/trajectory.hpp"
#include "sitesim/world.hpp"

namespace sitesim {

// Raw little-endian float32 grid, row-major. The exchange format for height
// maps, observations, and dataset grids.
void write_f32_grid(const std::filesystem::path& path, const float* data, size_t count);
std::vector<float> read_f32_grid(const std::filesystem::path& path);

void append_f32le(std::vector<unsigned char>& out, const float* data, size_t count);

/// Height map -> <prefix>.f32 plus <prefix>.json sidecar
/// (width_cells, height_cells, cell_size, origin).
void save_height_map(const HeightMap& map, const std::filesystem::path& prefix);
HeightMap load_height_map(const std::filesystem::path& prefix);

void save_observation(const Observation& obs, const std::filesystem::path& prefix);

/// Trajectory <-> JSON array of [x, y, t].
std::string trajectory_to_json(const TimedTrajectory& traj);
TimedTrajectory trajectory_from_json(const std::string& text);
TimedTrajectory load_trajectory(const std::filesystem::path& path);

/// TrajectoryMessage <-> JSON with the sentinel-padded waypoint array, so
/// external policy processes can participate over files or pipes.
std::string message_to_json(const TrajectoryMessage& msg);
TrajectoryMessage message_from_json(const std::string& text);

/// Site snapshot: terrain in the grid format plus a JSON header with poses,
/// load, route, and clock.
void save_site_state(const SiteState& state, const std::filesystem::path& prefix);
SiteState load_site_state(const std::filesystem::path& prefix);

/// 8-bit binary PGM (P5).
void write_pgm(const std::filesystem::path& path, size_t width, size_t height,
               const std::vector<uint8_t>& pixels);

}  // namespace sitesim
