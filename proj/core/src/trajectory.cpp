#include "sitesim/trajectory.hpp"

#include <cmath>

#include "sitesim/agents.hpp"
#include "sitesim/errors.hpp"

namespace sitesim {

namespace {
constexpr double kMoveEps = 1e-6;  // cm, below this a segment is a hold
}

TimedTrajectory TimedTrajectory::from_waypoints(const std::vector<Waypoint>& wps) {
  TimedTrajectory t;
  for (const Waypoint& wp : wps) t.append(wp);
  return t;
}

void TimedTrajectory::append(Waypoint wp) {
  if (!std::isfinite(wp.x) || !std::isfinite(wp.y) || !std::isfinite(wp.t))
    throw InvalidTrajectory("waypoint must be finite");
  if (wp.x < 0.0f || wp.y < 0.0f)
    throw InvalidTrajectory("waypoint coordinates must be >= 0");
  if (!waypoints_.empty() && wp.t <= waypoints_.back().t)
    throw InvalidTrajectory("waypoint timestamps must be strictly increasing");
  waypoints_.push_back(wp);
}

Vec2 TimedTrajectory::position_at(double t) const {
  if (waypoints_.empty()) throw InvalidTrajectory("position_at on empty trajectory");
  if (t <= waypoints_.front().t)
    return {waypoints_.front().x, waypoints_.front().y};
  if (t >= waypoints_.back().t) return {waypoints_.back().x, waypoints_.back().y};
  for (size_t i = 1; i < waypoints_.size(); ++i) {
    if (t <= waypoints_[i].t) {
      const Waypoint& a = waypoints_[i - 1];
      const Waypoint& b = waypoints_[i];
      const double u = (t - a.t) / (static_cast<double>(b.t) - a.t);
      return {a.x + (static_cast<double>(b.x) - a.x) * u,
              a.y + (static_cast<double>(b.y) - a.y) * u};
    }
  }
  return {waypoints_.back().x, waypoints_.back().y};
}

double TimedTrajectory::travel_direction_at(double t, double fallback) const {
  if (waypoints_.size() < 2) return fallback;

  double last_dir = fallback;
  bool seen_motion = false;
  for (size_t i = 1; i < waypoints_.size(); ++i) {
    const Waypoint& a = waypoints_[i - 1];
    const Waypoint& b = waypoints_[i];
    const double dx = static_cast<double>(b.x) - a.x;
    const double dy = static_cast<double>(b.y) - a.y;
    const bool moves = std::hypot(dx, dy) > kMoveEps;
    if (moves) {
      if (!seen_motion || t >= a.t) last_dir = std::atan2(dy, dx);
      seen_motion = true;
    }
    if (t <= b.t && seen_motion) return last_dir;
  }
  return last_dir;
}

TimedTrajectory TimedTrajectory::with_time_shift(size_t from_index, double dt) const {
  TimedTrajectory out;
  for (size_t i = 0; i < waypoints_.size(); ++i) {
    Waypoint wp = waypoints_[i];
    if (i >= from_index) wp.t = static_cast<float>(wp.t + dt);
    out.append(wp);
  }
  return out;
}

EncodedTrajectory encode_trajectory(const TimedTrajectory& traj) {
  if (traj.size() > kTrajectoryCapacity)
    throw TrajectoryTooLong("trajectory exceeds capacity");
  EncodedTrajectory enc;
  enc.fill({kEndOfLegToken, kEndOfLegToken, kEndOfLegToken});
  for (size_t i = 0; i < traj.size(); ++i) enc[i] = traj[i];
  return enc;
}

TimedTrajectory decode_trajectory(const EncodedTrajectory& enc) {
  TimedTrajectory out;
  for (const Waypoint& wp : enc) {
    if (wp.x == kEndOfLegToken && wp.y == kEndOfLegToken && wp.t == kEndOfLegToken)
      break;
    out.append(wp);
  }
  return out;
}

std::array<uint8_t, kTrajectoryCapacity> end_of_leg_mask(const TimedTrajectory& traj) {
  std::array<uint8_t, kTrajectoryCapacity> mask{};
  for (size_t i = 0; i < kTrajectoryCapacity; ++i)
    mask[i] = i >= traj.size() ? 1 : 0;
  return mask;
}

void validate_feasible(const TimedTrajectory& traj, const AgentSpec& spec) {
  for (size_t i = 1; i < traj.size(); ++i) {
    const Waypoint& a = traj[i - 1];
    const Waypoint& b = traj[i];
    const double dist = std::hypot(static_cast<double>(b.x) - a.x,
                                   static_cast<double>(b.y) - a.y);
    const double dt = static_cast<double>(b.t) - a.t;
    if (dist > spec.speed * dt + 1e-3)
      throw InvalidTrajectory("trajectory exceeds agent speed");
  }
}

}  // namespace sitesim
