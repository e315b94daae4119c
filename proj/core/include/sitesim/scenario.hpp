#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "sitesim/coordination.hpp"
#include "sitesim/experts.hpp"
#include "sitesim/localization.hpp"
#include "sitesim/observation.hpp"
#include "sitesim/world.hpp"

namespace sitesim {

// The six experimental arms: each agent alone, both uncoordinated, both under
// stop-and-wait, and stop-and-wait under localization error without and with
// compensation.
enum class Mode {
  DozerOnly,
  DumperOnly,
  Uncoordinated,
  Saw,
  SawLocNoise,
  SawLocAware,
};

std::string mode_to_string(Mode mode);
Mode mode_from_string(const std::string& name);

struct IntRange {
  int lo = 0;
  int hi = 0;
};

struct RealRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct ScenarioConfig {
  // Site geometry (lab scale).
  double site_width = 250.0;   // cm
  double site_height = 250.0;  // cm
  double cell_size = 1.0;      // cm/cell
  double target_height = 0.0;  // cm

  // Randomization ranges.
  IntRange pile_count{2, 3};
  RealRange pile_volume{8000.0, 15000.0};  // cm^3
  RealRange pile_sigma{10.0, 16.0};        // cm
  IntRange dump_point_count{1, 2};
  double placement_margin = 42.0;   // keep piles/dump points off the edges [cm]
  double min_separation = 35.0;     // between placed features [cm]
  double loading_clearance = 85.0;  // keep features away from the loading point [cm]
  // Strip along the loading point's edge excluded from the grading area, so
  // the loading station sits off the work zone like the lab layout.
  double loading_apron = 45.0;
  RealRange dozer_start_x{60.0, 190.0};
  RealRange dozer_start_y{60.0, 190.0};
  double dumper_start_jitter = 8.0;  // cm along the loading edge
  Vec2 loading_point{200.0, 12.0};

  uint64_t seed = 1;
  Mode mode = Mode::Saw;
  double timeout = 1200.0;        // s
  double dt = 0.1;                // s
  double done_threshold = 0.03;   // uncleared fraction counting as finished

  AgentSpec dozer_spec = AgentSpec::dozer();
  AgentSpec dumper_spec = AgentSpec::dumper();
  SandSpreadParams spread;
  SawParams saw;
  double aware_margin_boost = 12.0;  // extra SAW margin in SawLocAware [cm]

  ObservationNoiseParams noise;  // dataset augmentation
  LocalizationParams localization = LocalizationParams::paper_sim(0.02);

  DozerExpertParams dozer_expert;
  DumperExpertParams dumper_expert;

  void validate() const;
};

/// Load a config from JSON, starting from the defaults above; unknown keys
/// are rejected so typos fail loudly. Throws ConfigError / IoError.
ScenarioConfig config_from_json_file(const std::filesystem::path& path);
ScenarioConfig config_from_json(const std::string& text);
std::string config_to_json(const ScenarioConfig& config);

/// Deterministic function of (config.seed, episode_index): piles realized via
/// the sand-spreading kernel, dump points and start poses sampled with
/// non-overlap constraints (rejection with up to 100 attempts, then
/// InfeasibleScenario).
SiteState generate_scenario(const ScenarioConfig& config, uint64_t episode_index);

/// The derived 64-bit stream seed for (root, episode, purpose); recorded in
/// metrics so every episode can be reproduced standalone.
uint64_t episode_seed(uint64_t root_seed, uint64_t episode_index);

}  // namespace sitesim
