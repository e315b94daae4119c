#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sitesim/agents.hpp"
#include "sitesim/geometry.hpp"
#include "sitesim/height_map.hpp"
#include "sitesim/trajectory.hpp"

namespace sitesim {

// Dumper service schedule: one fixed loading point and an ordered list of
// dump points, serviced in order.
struct DumperRoute {
  Vec2 loading_point;
  std::vector<Vec2> dump_points;
  size_t next_index = 0;

  bool complete() const { return next_index >= dump_points.size(); }
};

struct SandSpreadParams {
  double sigma = 13.0;          // cm
  double pile_volume = 1.0e4;   // cm^3 per dump
};

// Full simulation state. The POMDP state s: terrain, both agent poses, the
// dumper's payload, the dump schedule and the episode clock, plus the volume
// ledger used for conservation checks and the uncleared metric.
struct SiteState {
  HeightMap map;
  Pose dozer;
  Pose dumper;
  double dumper_load = 0.0;  // cm^3
  DumperRoute route;
  double clock = 0.0;  // s
  double target_height = 0.0;
  Polygon grading_boundary;  // sand pushed beyond it leaves the site

  // Volume ledger (cm^3).
  double cleared_volume = 0.0;        // sand that crossed the boundary
  double total_dumped = 0.0;          // cumulative dump_sand volume
  double initial_above_target = 0.0;  // set by the scenario generator
  double map_volume = 0.0;            // running total, kept in sync by world ops

  // Navigation offsets applied to the dumper's dump/load triggers: under
  // localization error the vehicle acts on where it believes it is. Zero in
  // noise-free runs.
  Vec2 dumper_nav_offset;

  void recompute_map_volume() { map_volume = map.total_volume(); }
};

struct StepParams {
  AgentSpec dozer_spec = AgentSpec::dozer();
  AgentSpec dumper_spec = AgentSpec::dumper();
  SandSpreadParams spread;
  double dump_trigger_radius = 10.0;       // cm
  double dump_trigger_heading_tol = 15.0 * kPi / 180.0;
  double load_trigger_radius = 10.0;       // cm
  double deposit_depth = 15.0;             // cm of strip ahead of the blade
  double dump_park_offset = 40.0;          // truck center to rear drop point [cm]
};

/// Where the dumper's center parks to drop sand on `dump_point`: offset along
/// the reverse-approach facing so the rear sits over the point.
Vec2 dump_park_point(const DumperRoute& route, const Vec2& dump_point, double park_offset);

// A trajectory plus its execution intent. The published (x, y, t) waypoints
// cannot distinguish a forward push from backing up along the same line, so
// the planner annotates each arrival segment with its gear and the facing to
// park in at the end. Bare trajectories (external policies, tests) leave the
// annotations empty and the vehicle picks the facing needing least rotation.
struct DriveCommand {
  TimedTrajectory trajectory;
  std::vector<uint8_t> reverse_gear;  // reverse_gear[i]: segment into waypoint i
  std::optional<double> final_facing;

  DriveCommand() = default;
  DriveCommand(TimedTrajectory traj) : trajectory(std::move(traj)) {}  // NOLINT

  bool empty() const { return trajectory.empty(); }
  bool annotated() const { return reverse_gear.size() == trajectory.size(); }
};

/// Deposit one Gaussian pile at `point`, decrementing the dumper load.
/// Total added volume equals params.pile_volume (renormalized at edges).
/// Throws InsufficientLoad when the payload cannot cover the pile.
void dump_sand(SiteState& state, const Vec2& point, const SandSpreadParams& params);

/// Advance the dozer blade by `displacement` cm along `state.dozer.heading`:
/// swept cells are cut to target height; the cut volume is spread uniformly
/// over the blade-width strip directly ahead; shares falling outside the
/// grading boundary (or the map) are moved to the cleared-volume ledger.
void dozer_push_step(SiteState& state, double displacement, const AgentSpec& dozer_spec,
                     double deposit_depth = 15.0);

/// One transition of dt seconds: both agents track their timed trajectories
/// (linear interpolation between waypoints; rotate-in-place during holds at
/// turn_rate toward the next segment's facing), forward dozer motion grades,
/// and the dumper's dump/load triggers fire. Collisions are detected by
/// check_footprint_collision, not prevented here.
void step(SiteState& state, const DriveCommand& dozer_cmd,
          const DriveCommand& dumper_cmd, double dt, const StepParams& params);

/// Exact separating-axis overlap of the two inflated footprints. `margin` is
/// the required clearance between the bodies (each rectangle grows by
/// margin/2 per side).
bool check_footprint_collision(const Pose& pose_a, const AgentSpec& spec_a,
                               const Pose& pose_b, const AgentSpec& spec_b,
                               double margin);

/// Fraction of all sand ever present above target (initial piles plus dumps)
/// still above target inside the grading boundary. 0 when no sand was ever
/// present.
double uncleared_fraction(const SiteState& state, double total_dumped);

OrientedRect footprint(const Pose& pose, const AgentSpec& spec, double margin = 0.0);

/// FNV-1a hash over terrain, poses, and route; used to verify that paired
/// suite modes consumed identical scenarios.
uint64_t scenario_hash(const SiteState& state);

}  // namespace sitesim
