#pragma once

#include "sitesim/observation.hpp"
#include "sitesim/trajectory.hpp"
#include "sitesim/world.hpp"

namespace sitesim {

// Behavioral contract shared by the heuristic experts and any externally
// trained policy evaluated through file-based trajectory exchange: map an
// observation plus the visible state to one trajectory leg starting at the
// agent's current position (within 1 cm). An empty trajectory means the
// policy has nothing left to do (site graded / route complete).
class Policy {
 public:
  virtual ~Policy() = default;
  virtual TimedTrajectory plan(const Observation& obs, const SiteState& state) = 0;

  /// Plan plus execution intent (gear per segment, parked facing). The
  /// default wraps plan() without annotations; the vehicle then infers its
  /// facing by minimal rotation.
  virtual DriveCommand plan_drive(const Observation& obs, const SiteState& state) {
    return DriveCommand(plan(obs, state));
  }
};

struct DozerExpertParams {
  double work_threshold = 0.5;       // cm above target that counts as work
  double fov_side = 85.0;            // local window side [cm]
  double approach_clearance = 12.0;  // gap between blade and pile at push start [cm]
  double boundary_overshoot = 5.0;   // how far the blade crosses the cliff [cm]
  double carry_distance = 50.0;      // how far one push carries past the lobe [cm]
  double waypoint_spacing = 15.0;    // cm between emitted waypoints
  double relocate_standoff = 25.0;   // stop this far from a distant pile [cm]
};

// Grading expert: pick the highest-volume above-target lobe in the local
// window, back up behind it, and push it straight over the nearest stretch
// of the grading boundary. Travels in reverse between pushes (blade only
// engages soil on forward motion).
class DozerExpert : public Policy {
 public:
  explicit DozerExpert(AgentSpec spec, DozerExpertParams params = {});

  TimedTrajectory plan(const Observation& obs, const SiteState& state) override;
  DriveCommand plan_drive(const Observation& obs, const SiteState& state) override;

 private:
  AgentSpec spec_;
  DozerExpertParams params_;
};

struct DumperExpertParams {
  double load_duration = 10.0;     // s spent at the loading point
  double dump_duration = 5.0;      // s spent unloading
  double arrive_radius = 6.0;      // cm, "already there" test
  double waypoint_spacing = 15.0;
  double dump_park_offset = 40.0;  // matches StepParams.dump_park_offset
};

// Haul-cycle expert implementing the four-segment loading/unloading routine:
// load at L (rear toward the site), reverse straight to the next dump point,
// unload, drive forward back to L. Facings are chosen so rotations stay
// minimal: the dumper shuttles along straight L-to-D lines.
class DumperExpert : public Policy {
 public:
  DumperExpert(AgentSpec spec, SandSpreadParams spread, DumperExpertParams params = {});

  TimedTrajectory plan(const Observation& obs, const SiteState& state) override;
  DriveCommand plan_drive(const Observation& obs, const SiteState& state) override;

  /// Heading at the dump point: nose away from the point, along the
  /// approach line back toward the loading point.
  static double dump_facing(const DumperRoute& route, const Vec2& dump_point);

  /// Loading orientation at L: rear toward the site interior.
  static double loading_facing(const SiteState& state);

 private:
  AgentSpec spec_;
  SandSpreadParams spread_;
  DumperExpertParams params_;
};

}  // namespace sitesim
