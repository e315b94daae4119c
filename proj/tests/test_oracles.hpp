#pragma once

// Test-only oracles, independent of the implementation paths they check:
// dense-time brute force for conflicts and a feasible random-leg generator.

#include <optional>

#include "sitesim/coordination.hpp"
#include "sitesim/rng.hpp"
#include "sitesim/world.hpp"

namespace sitesim::testing {

// Earliest collision time found by sampling at `dt` with the raw safety
// margin (no tunneling inflation); the reference for detect_conflict.
inline std::optional<double> brute_force_conflict(const TimedTrajectory& dozer_traj,
                                                  const TimedTrajectory& dumper_traj,
                                                  const AgentSpecs& specs, double margin,
                                                  double dt) {
  if (dozer_traj.empty() || dumper_traj.empty()) return std::nullopt;
  const double t0 = std::min(dozer_traj.start_time(), dumper_traj.start_time());
  const double t1 = std::max(dozer_traj.end_time(), dumper_traj.end_time());
  for (double t = t0; t <= t1 + 1e-12; t += dt) {
    const double tc = std::min(t, t1);
    const Vec2 pa = dozer_traj.position_at(tc);
    const Vec2 pb = dumper_traj.position_at(tc);
    const Pose a{pa.x, pa.y, dozer_traj.travel_direction_at(tc, 0.0), tc};
    const Pose b{pb.x, pb.y, dumper_traj.travel_direction_at(tc, 0.0), tc};
    if (check_footprint_collision(a, specs.dozer, b, specs.dumper, margin)) return tc;
  }
  return std::nullopt;
}

// Smallest multiple of `increment` (up to max_hold) whose time shift clears
// the brute-force check; mirrors the stop-and-wait search independently.
inline std::optional<double> brute_force_min_hold(const TimedTrajectory& dozer_traj,
                                                  const TimedTrajectory& dumper_traj,
                                                  size_t hold_index, const AgentSpecs& specs,
                                                  const SawParams& params, double oracle_dt) {
  const double margin =
      params.safety_margin +
      (specs.dozer.speed + specs.dumper.speed) * params.check_dt * 0.5;
  for (double h = params.hold_increment; h <= params.max_hold + 1e-9;
       h += params.hold_increment) {
    const TimedTrajectory shifted = dumper_traj.with_time_shift(hold_index, h);
    if (!brute_force_conflict(dozer_traj, shifted, specs, margin, oracle_dt)) return h;
  }
  return std::nullopt;
}

// Random kinematically feasible leg: holds and straight segments at the
// agent's top speed, inside the lab site.
inline TimedTrajectory random_leg(RngStream& rng, const AgentSpec& spec,
                                  double start_time = 0.0) {
  TimedTrajectory traj;
  double x = rng.uniform(30.0, 220.0);
  double y = rng.uniform(30.0, 220.0);
  double t = start_time;
  traj.append({static_cast<float>(x), static_cast<float>(y), static_cast<float>(t)});
  const int segments = static_cast<int>(rng.uniform_int(2, 6));
  for (int s = 0; s < segments; ++s) {
    if (rng.uniform() < 0.3) {
      t += rng.uniform(0.5, 4.0);
    } else {
      const double nx = rng.uniform(20.0, 230.0);
      const double ny = rng.uniform(20.0, 230.0);
      const double dist = std::hypot(nx - x, ny - y);
      if (dist < 1.0) continue;
      t += dist / spec.speed;
      x = nx;
      y = ny;
    }
    traj.append({static_cast<float>(x), static_cast<float>(y), static_cast<float>(t)});
  }
  return traj;
}

}  // namespace sitesim::testing
