#pragma once

#include <cstdint>
#include <filesystem>

#include "sitesim/episode.hpp"

namespace sitesim {

struct DatasetManifest {
  int format_version = 1;
  size_t episodes = 0;
  size_t records = 0;
  size_t skipped_doomed = 0;  // pinned arbitration steps carry no safe label
  std::string grids_file = "grids.bin";
  std::string index_file = "records.jsonl";
};

/// Behavior-cloning export: one record per planning event. Grids go to a
/// single little-endian float32 blob (offsets recorded per record), poses and
/// sentinel-padded trajectories to a JSON-lines index, plus a manifest with
/// counts and a config echo. Re-running with the same config and seed
/// reproduces the output byte for byte.
DatasetManifest export_dataset(const ScenarioConfig& config, size_t n_episodes,
                               const std::filesystem::path& out_dir);

}  // namespace sitesim
