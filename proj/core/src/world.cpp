#include "sitesim/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "sitesim/errors.hpp"

namespace sitesim {

namespace {

constexpr double kMoveEps = 1e-6;  // cm

double turn_toward(double heading, double target, double max_step) {
  const double d = angle_diff(heading, target);
  if (std::abs(d) <= max_step) return target;
  return wrap_angle(heading + (d > 0 ? max_step : -max_step));
}

// Of `dir` and its reverse, the facing reachable with less rotation.
double closest_facing(double heading, double dir) {
  const double flipped = wrap_angle(dir + kPi);
  return std::abs(angle_diff(heading, dir)) <= std::abs(angle_diff(heading, flipped))
             ? dir
             : flipped;
}

// Facing to hold while rotating in place at time t: the facing demanded by
// the next motion segment, or the parked facing once the plan has no more
// motion. Annotated commands pin forward/reverse per segment; bare ones take
// whichever facing needs less rotation.
bool hold_facing(const DriveCommand& cmd, double t, double current_heading,
                 double& facing) {
  const auto& wps = cmd.trajectory.waypoints();
  for (size_t i = 1; i < wps.size(); ++i) {
    if (wps[i].t <= t) continue;
    const double dx = static_cast<double>(wps[i].x) - wps[i - 1].x;
    const double dy = static_cast<double>(wps[i].y) - wps[i - 1].y;
    if (std::hypot(dx, dy) > kMoveEps) {
      const double travel = std::atan2(dy, dx);
      if (cmd.annotated()) {
        facing = cmd.reverse_gear[i] ? wrap_angle(travel + kPi) : travel;
      } else {
        facing = closest_facing(current_heading, travel);
      }
      return true;
    }
  }
  if (cmd.final_facing.has_value()) {
    facing = *cmd.final_facing;
    return true;
  }
  return false;
}

// Facing for the motion segment active at time t (which has displacement).
double motion_facing(const DriveCommand& cmd, double t, double travel,
                     double current_heading) {
  if (!cmd.annotated()) return closest_facing(current_heading, travel);
  const auto& wps = cmd.trajectory.waypoints();
  for (size_t i = 1; i < wps.size(); ++i) {
    if (t <= wps[i].t + 1e-12)
      return cmd.reverse_gear[i] ? wrap_angle(travel + kPi) : travel;
  }
  return cmd.reverse_gear.back() ? wrap_angle(travel + kPi) : travel;
}

// Heading at the dump point: nose away from the point along the approach
// line back toward the loading point (the reverse-approach orientation).
double dump_facing(const SiteState& state, const Vec2& point) {
  const Vec2 d = state.route.loading_point - point;
  if (d.norm() < 1e-6) return 0.0;
  return std::atan2(d.y, d.x);
}

}  // namespace

void dump_sand(SiteState& state, const Vec2& point, const SandSpreadParams& params) {
  if (params.sigma <= 0.0 || params.pile_volume <= 0.0)
    throw ConfigError("SandSpreadParams must be positive");
  if (state.dumper_load + 1e-9 < params.pile_volume)
    throw InsufficientLoad("dumper load below pile volume");
  if (!state.map.in_bounds(point))
    throw ConfigError("dump point outside the site");

  add_sand_pile(state.map, point, params.sigma, params.pile_volume);
  state.dumper_load -= params.pile_volume;
  state.total_dumped += params.pile_volume;
  state.map_volume += params.pile_volume;
}

void dozer_push_step(SiteState& state, double displacement, const AgentSpec& dozer_spec,
                     double deposit_depth) {
  if (displacement <= 0.0) return;

  HeightMap& map = state.map;
  const double cell = map.cell_size();
  const double target = state.target_height;
  const Vec2 fwd = heading_vec(state.dozer.heading);
  const Vec2 front_new = state.dozer.position() + fwd * (dozer_spec.length * 0.5);
  const Vec2 front_old = front_new - fwd * displacement;

  const OrientedRect sweep{(front_old + front_new) * 0.5, state.dozer.heading,
                           displacement, dozer_spec.blade_width};

  // Cut every swept cell down to target height.
  double cut_volume = 0.0;
  {
    double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
    for (const Vec2& p : sweep.corners()) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
    const long c0 = std::max(0L, static_cast<long>(std::floor((min_x - map.origin().x) / cell)));
    const long c1 = std::min(static_cast<long>(map.width_cells()) - 1,
                             static_cast<long>(std::floor((max_x - map.origin().x) / cell)));
    const long r0 = std::max(0L, static_cast<long>(std::floor((min_y - map.origin().y) / cell)));
    const long r1 = std::min(static_cast<long>(map.height_cells()) - 1,
                             static_cast<long>(std::floor((max_y - map.origin().y) / cell)));
    for (long r = r0; r <= r1; ++r) {
      for (long c = c0; c <= c1; ++c) {
        const size_t cc = static_cast<size_t>(c), rr = static_cast<size_t>(r);
        double& h = map.at(cc, rr);
        if (h <= target) continue;
        if (!sweep.contains(map.cell_center(cc, rr))) continue;
        cut_volume += (h - target) * map.cell_area();
        h = target;
      }
    }
  }
  if (cut_volume <= 0.0) return;

  // Spread the cut uniformly over the strip ahead of the blade. Strip shares
  // beyond the grading boundary (or off the map) leave the site: that is the
  // cliff where graded sand exits.
  const OrientedRect strip{front_new + fwd * (deposit_depth * 0.5), state.dozer.heading,
                           deposit_depth, dozer_spec.blade_width};
  double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
  for (const Vec2& p : strip.corners()) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  // Lattice positions follow the map's cell grid but extend past its edges so
  // off-map shares are counted instead of silently clipped.
  const long c0 = static_cast<long>(std::floor((min_x - map.origin().x) / cell));
  const long c1 = static_cast<long>(std::floor((max_x - map.origin().x) / cell));
  const long r0 = static_cast<long>(std::floor((min_y - map.origin().y) / cell));
  const long r1 = static_cast<long>(std::floor((max_y - map.origin().y) / cell));

  std::vector<std::pair<size_t, size_t>> receivers;
  size_t n_total = 0;
  for (long r = r0; r <= r1; ++r) {
    for (long c = c0; c <= c1; ++c) {
      const Vec2 center{map.origin().x + (static_cast<double>(c) + 0.5) * cell,
                        map.origin().y + (static_cast<double>(r) + 0.5) * cell};
      if (!strip.contains(center)) continue;
      ++n_total;
      const bool on_map = c >= 0 && r >= 0 && c < static_cast<long>(map.width_cells()) &&
                          r < static_cast<long>(map.height_cells());
      if (on_map && state.grading_boundary.contains(center))
        receivers.emplace_back(static_cast<size_t>(c), static_cast<size_t>(r));
    }
  }

  if (n_total == 0) {
    state.cleared_volume += cut_volume;
    state.map_volume -= cut_volume;
    return;
  }

  const double share = cut_volume / static_cast<double>(n_total);
  const double height_share = share / map.cell_area();
  for (const auto& [c, r] : receivers) map.at(c, r) += height_share;

  const double exited = share * static_cast<double>(n_total - receivers.size());
  state.cleared_volume += exited;
  state.map_volume -= exited;
}

void step(SiteState& state, const DriveCommand& dozer_cmd,
          const DriveCommand& dumper_cmd, double dt, const StepParams& params) {
  if (dt <= 0.0) throw ConfigError("step: dt must be > 0");
  const double t1 = state.clock + dt;

  auto advance = [&](Pose& pose, const DriveCommand& cmd, const AgentSpec& spec,
                     bool grades) {
    if (cmd.empty()) return;
    const Vec2 old_pos = pose.position();
    const Vec2 new_pos = cmd.trajectory.position_at(t1);
    const Vec2 d = new_pos - old_pos;
    if (d.norm() > kMoveEps) {
      const double travel = std::atan2(d.y, d.x);
      pose.heading = turn_toward(pose.heading,
                                 motion_facing(cmd, t1, travel, pose.heading),
                                 spec.turn_rate * dt);
      pose.x = new_pos.x;
      pose.y = new_pos.y;
      const bool forward = std::abs(angle_diff(pose.heading, travel)) < kPi * 0.5;
      if (grades && forward)
        dozer_push_step(state, d.norm(), spec, params.deposit_depth);
    } else {
      double facing;
      if (hold_facing(cmd, t1, pose.heading, facing))
        pose.heading = turn_toward(pose.heading, facing, spec.turn_rate * dt);
    }
  };

  advance(state.dozer, dozer_cmd, params.dozer_spec, true);
  advance(state.dumper, dumper_cmd, params.dumper_spec, false);

  // Dump and load triggers act on where the dumper believes it is; the
  // offsets are zero without localization error. Sand leaves over the rear:
  // the truck parks dump_park_offset short of the point, facing away from it.
  const Vec2 believed = state.dumper.position() + state.dumper_nav_offset;
  if (!state.route.complete() &&
      state.dumper_load + 1e-9 >= params.spread.pile_volume) {
    const Vec2 dump_point = state.route.dump_points[state.route.next_index];
    const Vec2 park = dump_park_point(state.route, dump_point, params.dump_park_offset);
    const bool near = distance(believed, park) <= params.dump_trigger_radius;
    const bool aligned =
        std::abs(angle_diff(state.dumper.heading, dump_facing(state, dump_point))) <=
        params.dump_trigger_heading_tol;
    if (near && aligned) {
      // The pile lands where the rear actually is; with perfect localization
      // that is the scheduled dump point.
      const Vec2 physical = dump_point - state.dumper_nav_offset;
      const Vec2 landing = state.map.in_bounds(physical) ? physical : believed;
      if (state.map.in_bounds(landing)) {
        dump_sand(state, landing, params.spread);
        state.route.next_index += 1;
      }
    }
  }
  if (distance(believed, state.route.loading_point) <= params.load_trigger_radius) {
    state.dumper_load = params.dumper_spec.payload_capacity;
  }

  state.clock = t1;
  state.dozer.t = t1;
  state.dumper.t = t1;
}

Vec2 dump_park_point(const DumperRoute& route, const Vec2& dump_point,
                     double park_offset) {
  Vec2 toward_loading = route.loading_point - dump_point;
  const double len = toward_loading.norm();
  if (len < 1e-6) return dump_point;
  return dump_point + toward_loading * (park_offset / len);
}

OrientedRect footprint(const Pose& pose, const AgentSpec& spec, double margin) {
  return {pose.position(), pose.heading, spec.length + margin, spec.width + margin};
}

bool check_footprint_collision(const Pose& pose_a, const AgentSpec& spec_a,
                               const Pose& pose_b, const AgentSpec& spec_b,
                               double margin) {
  if (!pose_finite(pose_a) || !pose_finite(pose_b))
    throw InvalidTrajectory("collision check requires finite poses");
  return rects_overlap(footprint(pose_a, spec_a, margin), footprint(pose_b, spec_b, margin));
}

double uncleared_fraction(const SiteState& state, double total_dumped) {
  const double denom = state.initial_above_target + total_dumped;
  if (denom <= 1e-9) return 0.0;
  const double above = state.map.volume_above(state.target_height, state.grading_boundary);
  return std::clamp(above / denom, 0.0, 1.0);
}

uint64_t scenario_hash(const SiteState& state) {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (i * 8)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  auto mix_d = [&mix](double d) {
    uint64_t bits;
    static_assert(sizeof(bits) == sizeof(d));
    std::memcpy(&bits, &d, sizeof(bits));
    mix(bits);
  };
  for (double v : state.map.heights()) mix_d(v);
  mix_d(state.dozer.x);
  mix_d(state.dozer.y);
  mix_d(state.dozer.heading);
  mix_d(state.dumper.x);
  mix_d(state.dumper.y);
  mix_d(state.dumper.heading);
  mix_d(state.route.loading_point.x);
  mix_d(state.route.loading_point.y);
  for (const Vec2& p : state.route.dump_points) {
    mix_d(p.x);
    mix_d(p.y);
  }
  mix_d(state.target_height);
  return h;
}

}  // namespace sitesim
