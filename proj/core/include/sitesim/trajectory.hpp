#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "sitesim/geometry.hpp"

namespace sitesim {

struct AgentSpec;

// Fixed trajectory capacity (N_max). Legs are encoded as exactly this many
// waypoint slots; slots past the valid length carry the end-of-leg token.
inline constexpr size_t kTrajectoryCapacity = 32;
inline constexpr float kEndOfLegToken = -1.0f;

// One timed waypoint: planar position [cm] plus episode time [s]. Stored as
// float32 so the in-memory value, the binary dataset layout, and the sentinel
// codec are all the same representation and round-trip exactly.
struct Waypoint {
  float x = 0.0f;
  float y = 0.0f;
  float t = 0.0f;

  bool operator==(const Waypoint&) const = default;
};

using EncodedTrajectory = std::array<Waypoint, kTrajectoryCapacity>;

// Ordered (x, y, t) waypoints: the universal plan/action/message currency.
// Construction enforces non-negative coordinates (the -1 end-of-leg token
// must be unambiguous) and strictly increasing timestamps.
class TimedTrajectory {
 public:
  TimedTrajectory() = default;
  static TimedTrajectory from_waypoints(const std::vector<Waypoint>& wps);

  /// Appends a waypoint; throws InvalidTrajectory on negative coordinates,
  /// non-finite values, or non-increasing timestamps.
  void append(Waypoint wp);

  size_t size() const { return waypoints_.size(); }
  bool empty() const { return waypoints_.empty(); }
  const Waypoint& operator[](size_t i) const { return waypoints_[i]; }
  const std::vector<Waypoint>& waypoints() const { return waypoints_; }

  double start_time() const { return waypoints_.front().t; }
  double end_time() const { return waypoints_.back().t; }

  /// Position at time t: linear interpolation between waypoints, clamped to
  /// the endpoints outside the time span. Trajectory must be non-empty.
  Vec2 position_at(double t) const;

  /// Travel direction of the motion segment active at time t, in radians.
  /// Stationary stretches keep the direction of the latest motion segment;
  /// before any motion the first motion segment's direction is used.
  /// `fallback` is returned when the trajectory never moves.
  double travel_direction_at(double t, double fallback) const;

  /// Shift the timestamps of all waypoints at index >= from_index by dt.
  TimedTrajectory with_time_shift(size_t from_index, double dt) const;

  bool operator==(const TimedTrajectory&) const = default;

 private:
  std::vector<Waypoint> waypoints_;
};

/// Sentinel-padded fixed-size encoding; throws TrajectoryTooLong when the
/// trajectory exceeds kTrajectoryCapacity.
EncodedTrajectory encode_trajectory(const TimedTrajectory& traj);

/// Inverse of encode_trajectory; stops at the first end-of-leg token.
TimedTrajectory decode_trajectory(const EncodedTrajectory& enc);

/// Per-slot end-of-leg labels for an encoded leg (1 = token slot).
std::array<uint8_t, kTrajectoryCapacity> end_of_leg_mask(const TimedTrajectory& traj);

/// Checks translation feasibility against the owning agent's top speed:
/// distance between consecutive waypoints must fit in their time gap.
/// Throws InvalidTrajectory on violation.
void validate_feasible(const TimedTrajectory& traj, const AgentSpec& spec);

}  // namespace sitesim
