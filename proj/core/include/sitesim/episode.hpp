#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sitesim/scenario.hpp"

namespace sitesim {

// Per-episode outcome row (Table semantics): a collision ends the episode and
// leaves completion_time absent; timeouts also have no completion time.
struct EpisodeMetrics {
  bool collided = false;
  std::optional<double> completion_time;  // s, only for completed episodes
  double uncleared = 0.0;                 // fraction in [0, 1]
  uint64_t episode_seed = 0;
  uint64_t scenario_fingerprint = 0;

  // Telemetry used by the coordination safety checks.
  size_t saw_modifications = 0;   // adopted stop-and-wait holds
  size_t saw_violations = 0;      // adopted arbitration outputs that still conflicted
  size_t doomed_arbitrations = 0; // pinned situations where no hold could help
  double total_dumped = 0.0;      // cm^3

  bool completed() const { return completion_time.has_value(); }
  bool timed_out() const { return !collided && !completed(); }
};

// One record per planning event, consumed by the dataset exporter.
struct PlanRecord {
  uint64_t episode = 0;
  size_t step_index = 0;  // planning step, per episode
  AgentKind agent = AgentKind::Dozer;
  Observation clean_obs;
  Observation noisy_obs;
  Pose true_pose;
  Pose measured_pose;
  EncodedTrajectory expert_trajectory{};
  EncodedTrajectory modified_trajectory{};
  std::array<uint8_t, kTrajectoryCapacity> end_mask{};
  bool doomed = false;  // arbitration could not produce a safe plan
};

using PlanSink = std::function<void(const PlanRecord&)>;

struct EpisodeLog {
  struct Step {
    double t;
    Pose dozer;
    Pose dumper;
  };
  struct Plan {
    size_t step;  // index into `steps` when the plan was adopted
    AgentKind agent;
    TimedTrajectory trajectory;
  };
  struct Snapshot {
    size_t step;
    std::vector<float> grid;
  };
  // One row per stop-and-wait round the dumper ran.
  struct Arbitration {
    double t;
    bool conflict;        // candidate conflicted with the dozer plan
    double hold_seconds;  // adopted delay (0 if none)
    bool resolved;        // pair fully clean afterward
    bool ghost_only;      // clean during the dozer's live plan only
    bool pinned;          // no hold anywhere could help
  };

  size_t map_width = 0;
  size_t map_height = 0;
  double cell_size = 1.0;
  std::vector<Step> steps;
  std::vector<Plan> plans;
  std::vector<Snapshot> snapshots;
  std::vector<Arbitration> arbitrations;
  size_t snapshot_stride = 400;  // sim steps between terrain snapshots
};

struct EpisodeOptions {
  EpisodeLog* log = nullptr;
  PlanSink plan_sink;
  // Optional policy overrides (e.g. externally trained agents exchanging
  // trajectories through files); defaults are the heuristic experts.
  Policy* dozer_policy = nullptr;
  Policy* dumper_policy = nullptr;
};

struct EpisodeResult {
  EpisodeMetrics metrics;
  SiteState final_state;
};

/// Run one episode of `mode` on the given scenario: plan at leg boundaries,
/// arbitrate through the stop-and-wait coordinator when the mode coordinates,
/// step the world at config.dt, detect collisions on true poses, and stop on
/// collision, completion, or timeout.
EpisodeResult run_episode(SiteState scenario, const ScenarioConfig& config, Mode mode,
                          uint64_t episode_index, const EpisodeOptions& options = {});

/// Convenience: generate the scenario for (config.seed, episode_index) first.
EpisodeResult run_episode(const ScenarioConfig& config, Mode mode, uint64_t episode_index,
                          const EpisodeOptions& options = {});

}  // namespace sitesim
