#include "sitesim/experts.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace sitesim {

namespace {

constexpr size_t kLegSlotBudget = 30;  // leave headroom under kTrajectoryCapacity
constexpr double kRotationMargin = 0.2;   // s of slack after a planned rotation
constexpr double kMinRotation = 0.02;     // rad below which no hold is planned

enum class Motion { Forward, Reverse };

// Assembles one kinematically feasible leg: straight moves subdivided at
// roughly waypoint_spacing, rotations and waiting realized as holds, gear
// recorded per waypoint so execution cannot flip a push into a reverse.
class LegBuilder {
 public:
  LegBuilder(Vec2 start, double heading, double clock, const AgentSpec& spec,
             double spacing)
      : pos_(start), heading_(heading), t_(clock), spec_(spec), spacing_(spacing) {
    append(pos_, t_, false);
  }

  void hold(double duration) {
    if (duration <= 1e-3) return;
    t_ += duration;
    append(pos_, t_, false);
  }

  void rotate_to(double facing) {
    const double need = std::abs(angle_diff(heading_, facing));
    heading_ = facing;
    if (need < kMinRotation) return;
    hold(need / spec_.turn_rate + kRotationMargin);
  }

  // Straight move. Forward keeps the nose on the travel direction; Reverse
  // keeps it opposite. The preparatory rotation is planned automatically.
  void move_to(const Vec2& target, Motion motion) {
    const Vec2 d = target - pos_;
    const double dist = d.norm();
    if (dist < 1e-6) return;
    const double travel = std::atan2(d.y, d.x);
    rotate_to(motion == Motion::Forward ? travel : wrap_angle(travel + kPi));

    const size_t slots_left =
        cmd_.trajectory.size() < kLegSlotBudget ? kLegSlotBudget - cmd_.trajectory.size() : 1;
    const size_t n = std::clamp<size_t>(
        static_cast<size_t>(std::ceil(dist / spacing_)), 1, slots_left);
    const double seg_t = dist / spec_.speed;
    const Vec2 from = pos_;
    for (size_t i = 1; i <= n; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(n);
      append(from + d * u, t_ + seg_t * u, motion == Motion::Reverse);
    }
    t_ += seg_t;
    pos_ = target;
  }

  bool moved() const { return cmd_.trajectory.size() > 1; }

  DriveCommand take() {
    cmd_.final_facing = heading_;
    return std::move(cmd_);
  }

 private:
  void append(const Vec2& p, double t, bool reverse) {
    cmd_.trajectory.append({static_cast<float>(p.x), static_cast<float>(p.y),
                            static_cast<float>(t)});
    cmd_.reverse_gear.push_back(reverse ? 1 : 0);
  }

  Vec2 pos_;
  double heading_;
  double t_;
  const AgentSpec& spec_;
  double spacing_;
  DriveCommand cmd_;
};

Vec2 clamp_to_map(const HeightMap& map, Vec2 p, double margin) {
  p.x = std::clamp(p.x, map.origin().x + margin,
                   map.origin().x + map.world_width() - margin);
  p.y = std::clamp(p.y, map.origin().y + margin,
                   map.origin().y + map.world_height() - margin);
  return p;
}

struct Lobe {
  double volume = 0.0;     // cm^3 above target
  Vec2 centroid;           // volume-weighted, world coordinates
  std::vector<size_t> pixels;
};

// Connected components (4-neighborhood) of above-threshold pixels.
std::vector<Lobe> find_lobes(const Observation& obs, double threshold, double target) {
  std::vector<Lobe> lobes;
  std::vector<uint8_t> seen(kObsCells, 0);
  const double px_area = obs.resolution * obs.resolution;
  for (size_t start = 0; start < kObsCells; ++start) {
    if (seen[start] || obs.grid[start] <= threshold) continue;
    Lobe lobe;
    double wx = 0.0, wy = 0.0;
    std::vector<size_t> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      const size_t idx = stack.back();
      stack.pop_back();
      lobe.pixels.push_back(idx);
      const size_t c = idx % kObsSide;
      const size_t r = idx / kObsSide;
      const double v = (static_cast<double>(obs.grid[idx]) - target) * px_area;
      lobe.volume += v;
      const Vec2 p = obs.pixel_center(c, r);
      wx += v * p.x;
      wy += v * p.y;
      const size_t neighbors[4] = {idx - 1, idx + 1, idx - kObsSide, idx + kObsSide};
      const bool valid[4] = {c > 0, c + 1 < kObsSide, r > 0, r + 1 < kObsSide};
      for (int k = 0; k < 4; ++k) {
        if (!valid[k] || seen[neighbors[k]] || obs.grid[neighbors[k]] <= threshold)
          continue;
        seen[neighbors[k]] = 1;
        stack.push_back(neighbors[k]);
      }
    }
    if (lobe.volume > 0.0) {
      lobe.centroid = {wx / lobe.volume, wy / lobe.volume};
      lobes.push_back(std::move(lobe));
    }
  }
  return lobes;
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.dot(d);
  if (len2 < 1e-12) return distance(p, a);
  const double u = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return distance(p, a + d * u);
}

// Direction from `from` toward the nearest side of the grading boundary's
// bounding box, skipping directions whose push corridor would run sand into
// the loading station. Sorting by edge distance keeps pushes short.
Vec2 push_direction(const HeightMap& map, const Polygon& boundary, const Vec2& from,
                    const Vec2& loading_point) {
  double min_x = map.origin().x, min_y = map.origin().y;
  double max_x = min_x + map.world_width(), max_y = min_y + map.world_height();
  if (!boundary.empty()) {
    min_x = 1e300;
    min_y = 1e300;
    max_x = -1e300;
    max_y = -1e300;
    for (const Vec2& v : boundary.vertices()) {
      min_x = std::min(min_x, v.x);
      max_x = std::max(max_x, v.x);
      min_y = std::min(min_y, v.y);
      max_y = std::max(max_y, v.y);
    }
  }
  struct Option {
    Vec2 dir;
    double dist;
    Vec2 exit;
  };
  std::array<Option, 4> options{{
      {{-1.0, 0.0}, from.x - min_x, {min_x, from.y}},
      {{1.0, 0.0}, max_x - from.x, {max_x, from.y}},
      {{0.0, -1.0}, from.y - min_y, {from.x, min_y}},
      {{0.0, 1.0}, max_y - from.y, {from.x, max_y}},
  }};
  std::sort(options.begin(), options.end(),
            [](const Option& a, const Option& b) { return a.dist < b.dist; });
  // The swept lane includes the reverse approach behind the lobe, not just
  // the push corridor. 55 cm keeps the bodies apart without forbidding every
  // lane near the station.
  constexpr double kStationClearance = 55.0;
  constexpr double kApproachDepth = 90.0;
  auto lane_distance = [&](const Option& option) {
    const Vec2 approach_start = from - option.dir * kApproachDepth;
    return segment_distance(loading_point, approach_start, option.exit);
  };
  for (const Option& option : options) {
    if (lane_distance(option) >= kStationClearance) return option.dir;
  }
  // Sand sits deep in the station pocket: take the least-bad lane.
  const Option* best = &options[0];
  for (const Option& option : options) {
    if (lane_distance(option) > lane_distance(*best)) best = &option;
  }
  return best->dir;
}

double boundary_coordinate(const HeightMap& map, const Polygon& boundary, const Vec2& dir) {
  double min_x = map.origin().x, min_y = map.origin().y;
  double max_x = min_x + map.world_width(), max_y = min_y + map.world_height();
  if (!boundary.empty()) {
    min_x = 1e300;
    min_y = 1e300;
    max_x = -1e300;
    max_y = -1e300;
    for (const Vec2& v : boundary.vertices()) {
      min_x = std::min(min_x, v.x);
      max_x = std::max(max_x, v.x);
      min_y = std::min(min_y, v.y);
      max_y = std::max(max_y, v.y);
    }
  }
  if (dir.x < -0.5) return min_x;
  if (dir.x > 0.5) return max_x;
  if (dir.y < -0.5) return min_y;
  return max_y;
}

}  // namespace

DozerExpert::DozerExpert(AgentSpec spec, DozerExpertParams params)
    : spec_(spec), params_(params) {
  spec_.validate();
}

TimedTrajectory DozerExpert::plan(const Observation& obs, const SiteState& state) {
  return plan_drive(obs, state).trajectory;
}

DriveCommand DozerExpert::plan_drive(const Observation& obs, const SiteState& state) {
  const Pose& pose = obs.self_pose;
  const double target = state.target_height;
  const double threshold = target + params_.work_threshold;

  auto lobes = find_lobes(obs, threshold, target);
  // Lobes whose centroid fell off the gradable area cannot be pushed out.
  std::erase_if(lobes, [&](const Lobe& l) {
    return !state.map.in_bounds(l.centroid) ||
           (!state.grading_boundary.empty() && !state.grading_boundary.contains(l.centroid));
  });

  LegBuilder builder(pose.position(), pose.heading, state.clock, spec_,
                     params_.waypoint_spacing);

  if (lobes.empty()) {
    // No work in the local window: relocate toward the tallest pile left on
    // the site, or report done when the whole map is level.
    size_t col = 0, row = 0;
    double h = 0.0;
    if (!state.map.max_cell(col, row, h) || h <= threshold) return {};
    const Vec2 pile = state.map.cell_center(col, row);
    Vec2 away = pose.position() - pile;
    if (away.norm() < 1e-6) away = {1.0, 0.0};
    away = away * (1.0 / away.norm());
    const Vec2 staging =
        clamp_to_map(state.map, pile + away * params_.relocate_standoff, 2.0);
    if (distance(staging, pose.position()) < 2.0) {
      builder.hold(1.0);  // pile directly underneath; let the next window see it
      return builder.take();
    }
    builder.move_to(staging, Motion::Reverse);  // blade disengaged while travelling
    return builder.take();
  }

  // Highest-volume lobe, discounted by travel distance so the dozer keeps
  // working the wave it just pushed instead of criss-crossing the site.
  auto score = [&](const Lobe& l) {
    return l.volume / (1.0 + distance(l.centroid, pose.position()) / 85.0);
  };
  const Lobe* best = &lobes.front();
  for (const Lobe& l : lobes) {
    if (score(l) > score(*best) ||
        (score(l) == score(*best) &&
         distance(l.centroid, pose.position()) < distance(best->centroid, pose.position())))
      best = &l;
  }

  const Vec2 dir = push_direction(state.map, state.grading_boundary, best->centroid,
                                  state.route.loading_point);

  // Lobe extent along the push line, behind and ahead of the centroid.
  double extent_back = 0.0;
  double extent_fwd = 0.0;
  for (size_t idx : best->pixels) {
    const Vec2 p = obs.pixel_center(idx % kObsSide, idx / kObsSide);
    const double along = (p - best->centroid).dot(dir);
    extent_back = std::max(extent_back, -along);
    extent_fwd = std::max(extent_fwd, along);
  }

  const Vec2 start = clamp_to_map(
      state.map,
      best->centroid -
          dir * (extent_back + spec_.length * 0.5 + params_.approach_clearance),
      2.0);

  // One blade-load at a time: push through the lobe plus a carry distance,
  // finishing over the cliff edge only when it is already in reach. Shorter
  // pushes keep published sweeps small and shepherd the sand edge-ward over
  // several legs.
  const double edge = boundary_coordinate(state.map, state.grading_boundary, dir);
  const double front_stop_at_edge =
      (dir.x + dir.y < 0.0 ? edge - params_.boundary_overshoot
                           : edge + params_.boundary_overshoot);
  const double carry_front =
      (best->centroid.x * std::abs(dir.x) + best->centroid.y * std::abs(dir.y)) +
      (dir.x + dir.y) * (extent_fwd + params_.carry_distance);
  double front_target;
  if (dir.x + dir.y < 0.0) {
    front_target = std::max(front_stop_at_edge, carry_front);
  } else {
    front_target = std::min(front_stop_at_edge, carry_front);
  }
  Vec2 end = start;
  if (std::abs(dir.x) > 0.5) {
    end.x = front_target - dir.x * spec_.length * 0.5;
    end.y = best->centroid.y;
  } else {
    end.y = front_target - dir.y * spec_.length * 0.5;
    end.x = best->centroid.x;
  }
  if ((end - start).dot(dir) < 10.0) end = start + dir * 10.0;
  end = clamp_to_map(state.map, end, 1.0);

  builder.move_to(start, Motion::Reverse);
  builder.move_to(end, Motion::Forward);
  return builder.take();
}

DumperExpert::DumperExpert(AgentSpec spec, SandSpreadParams spread, DumperExpertParams params)
    : spec_(spec), spread_(spread), params_(params) {
  spec_.validate();
}

double DumperExpert::dump_facing(const DumperRoute& route, const Vec2& dump_point) {
  const Vec2 d = route.loading_point - dump_point;
  if (d.norm() < 1e-6) return 0.0;
  return std::atan2(d.y, d.x);
}

double DumperExpert::loading_facing(const SiteState& state) {
  const Vec2 centroid = state.grading_boundary.empty()
                            ? Vec2{state.map.origin().x + state.map.world_width() * 0.5,
                                   state.map.origin().y + state.map.world_height() * 0.5}
                            : state.grading_boundary.centroid();
  const Vec2 d = state.route.loading_point - centroid;
  if (d.norm() < 1e-6) return 0.0;
  return std::atan2(d.y, d.x);
}

TimedTrajectory DumperExpert::plan(const Observation& obs, const SiteState& state) {
  return plan_drive(obs, state).trajectory;
}

DriveCommand DumperExpert::plan_drive(const Observation& obs, const SiteState& state) {
  const Pose& pose = obs.self_pose;
  const DumperRoute& route = state.route;
  const Vec2 loading = route.loading_point;
  const bool loaded = state.dumper_load + 1e-9 >= spread_.pile_volume;
  const bool at_loading = distance(pose.position(), loading) <= params_.arrive_radius;

  LegBuilder builder(pose.position(), pose.heading, state.clock, spec_,
                     params_.waypoint_spacing);

  if (route.complete()) {
    if (at_loading) return {};  // route complete, parked at L
    builder.move_to(loading, Motion::Forward);
    builder.rotate_to(loading_facing(state));
    return builder.take();
  }

  const Vec2 dump_point = route.dump_points[route.next_index];
  const Vec2 park = dump_park_point(route, dump_point, params_.dump_park_offset);

  if (loaded) {
    if (distance(pose.position(), park) <= params_.arrive_radius) {
      // Segment 3: unload in place (the rear hangs over the dump point).
      builder.rotate_to(dump_facing(route, dump_point));
      builder.hold(params_.dump_duration);
      return builder.take();
    }
    // Segments 1-2: load, then back straight to the parking spot at the
    // dump point.
    if (at_loading) builder.hold(params_.load_duration);
    builder.move_to(park, Motion::Reverse);
    builder.rotate_to(dump_facing(route, dump_point));
    builder.hold(params_.dump_duration);
    return builder.take();
  }

  // Segment 4: empty, drive forward back to the loading point.
  builder.move_to(loading, Motion::Forward);
  builder.rotate_to(loading_facing(state));
  return builder.take();
}

}  // namespace sitesim
