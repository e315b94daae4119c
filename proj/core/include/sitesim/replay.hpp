#pragma once

#include <filesystem>

#include "sitesim/episode.hpp"

namespace sitesim {

/// Episode log <-> <path>.json plus a <stem>.grids.bin sidecar holding the
/// terrain snapshots as raw little-endian float32 grids.
void save_episode_log(const EpisodeLog& log, const std::filesystem::path& json_path);
EpisodeLog load_episode_log(const std::filesystem::path& json_path);

/// Rasterize one PGM frame per `stride` logged steps: terrain grayscale from
/// the latest snapshot, agent footprints and active planned trajectories
/// overlaid. Frame pixel dimensions equal the map cell dimensions.
/// Returns the number of frames written (ceil(steps / stride)).
size_t emit_replay(const EpisodeLog& log, const std::filesystem::path& out_dir,
                   size_t stride, const AgentSpec& dozer_spec = AgentSpec::dozer(),
                   const AgentSpec& dumper_spec = AgentSpec::dumper());

}  // namespace sitesim
