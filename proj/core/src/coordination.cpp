#include "sitesim/coordination.hpp"

#include <algorithm>
#include <cmath>

#include "sitesim/world.hpp"

namespace sitesim {

namespace {

Pose pose_on(const TimedTrajectory& traj, double t, double fallback_heading) {
  const Vec2 p = traj.position_at(t);
  return {p.x, p.y, traj.travel_direction_at(t, fallback_heading), t};
}

}  // namespace

ConflictReport detect_conflict(const TimedTrajectory& dozer_traj,
                               const TimedTrajectory& dumper_traj,
                               const AgentSpecs& specs, const SawParams& params) {
  params.validate();
  if (dozer_traj.empty() || dumper_traj.empty()) return {};

  const double t0 = std::min(dozer_traj.start_time(), dumper_traj.start_time());
  const double t1 = std::max(dozer_traj.end_time(), dumper_traj.end_time());

  // Sampling can tunnel through a contact shorter than check_dt; widening the
  // margin by half the largest relative displacement per sample closes it.
  const double margin =
      params.safety_margin +
      (specs.dozer.speed + specs.dumper.speed) * params.check_dt * 0.5;

  const size_t n = static_cast<size_t>(std::ceil((t1 - t0) / params.check_dt));
  for (size_t i = 0; i <= n; ++i) {
    const double t = std::min(t0 + static_cast<double>(i) * params.check_dt, t1);
    const Pose dozer = pose_on(dozer_traj, t, 0.0);
    const Pose dumper = pose_on(dumper_traj, t, 0.0);
    if (check_footprint_collision(dozer, specs.dozer, dumper, specs.dumper, margin)) {
      return {true, t, dumper.position()};
    }
  }
  return {};
}

SawResult apply_saw(const TimedTrajectory& dozer_traj, const TimedTrajectory& dumper_traj,
                    const AgentSpecs& specs, const SawParams& params) {
  SawResult result{dozer_traj, dumper_traj, false, 0.0, true, false};

  const ConflictReport conflict = detect_conflict(dozer_traj, dumper_traj, specs, params);
  if (!conflict) return result;
  if (dumper_traj.empty()) {
    result.resolved = false;  // a parked dumper has no timestamps to shift
    return result;
  }

  // Hold at the waypoint immediately preceding the first conflict so the
  // dumper advances as far as safely possible before stopping. When the
  // dozer later sweeps that very waypoint, no wait there can ever be safe,
  // so the placement retreats toward the leg start until one works.
  size_t preceding = 0;
  for (size_t i = 0; i < dumper_traj.size(); ++i) {
    if (dumper_traj[i].t <= conflict.first_conflict_time) preceding = i;
  }

  enum class Clear { No, GhostOnly, Full };
  const auto clears = [&](size_t index, double h, const SawParams& check_params) {
    const TimedTrajectory shifted = dumper_traj.with_time_shift(index, h);
    const ConflictReport report =
        detect_conflict(dozer_traj, shifted, specs, check_params);
    if (!report.conflict) return Clear::Full;
    // A conflict after the dozer's plan has ended is against its parked
    // ghost, not its published motion; the next publication re-arbitrates.
    return report.first_conflict_time > dozer_traj.end_time() + 1e-9 ? Clear::GhostOnly
                                                                     : Clear::No;
  };

  // One pass of the placement-retreat x hold-size search at a given margin.
  const auto search = [&](const SawParams& check_params) {
    struct Hit {
      bool found = false;
      size_t index = 0;
      double hold = 0.0;
      Clear clear = Clear::No;
    };
    Hit ghost;
    for (size_t offset = 0; offset <= preceding; ++offset) {
      const size_t index = preceding - offset;
      for (double h = check_params.hold_increment;
           h <= check_params.max_hold + 1e-9; h += check_params.hold_increment) {
        const Clear c = clears(index, h, check_params);
        if (c == Clear::Full) return Hit{true, index, h, c};
        if (c == Clear::GhostOnly && !ghost.found) ghost = {true, index, h, c};
      }
    }
    return ghost;
  };

  const auto adopt = [&](size_t index, double h, Clear clear, bool degraded) {
    result.dumper = dumper_traj.with_time_shift(index, h);
    result.modified = true;
    result.hold_seconds = h;
    result.resolved = clear == Clear::Full && !degraded;
    result.ghost_only = clear == Clear::GhostOnly;
    result.margin_degraded = degraded;
  };

  const auto full = search(params);
  if (full.found) {
    adopt(full.index, full.hold, full.clear, false);
    return result;
  }

  // Pinned at full margin: no wait keeps the required clearance. Retry at
  // the contact margin so the dumper can still thread past without touching.
  SawParams relaxed = params;
  relaxed.safety_margin = params.pinned_margin;
  const auto contact = search(relaxed);
  if (contact.found) {
    adopt(contact.index, contact.hold, contact.clear, true);
    return result;
  }

  // Even contact is unavoidable on this leg: wait out the dozer's entire
  // published plan from the leg start.
  const double fallback =
      std::max(0.0, dozer_traj.end_time() - dumper_traj[0].t) + params.hold_increment;
  const Clear c = clears(0, fallback, params);
  result.dumper = dumper_traj.with_time_shift(0, fallback);
  result.modified = true;
  result.hold_seconds = fallback;
  result.resolved = c == Clear::Full;
  result.ghost_only = c == Clear::GhostOnly;
  result.margin_degraded = c == Clear::No;
  return result;
}

Coordinator::Coordinator(std::string self_id, AgentKind kind, AgentSpecs specs,
                         SawParams params)
    : self_id_(std::move(self_id)), kind_(kind), specs_(specs), params_(params) {}

TimedTrajectory Coordinator::round(const std::vector<TrajectoryMessage>& published,
                                   const TimedTrajectory& self_plan) {
  last_result_.reset();
  const TrajectoryMessage* dozer_msg = nullptr;
  for (const TrajectoryMessage& msg : published) {
    if (msg.agent_id == self_id_) continue;
    auto [it, inserted] = seen_epochs_.try_emplace(msg.agent_id, msg.plan_epoch);
    if (!inserted) {
      if (msg.plan_epoch < it->second)
        throw StalePlan("plan epoch regressed for " + msg.agent_id);
      it->second = msg.plan_epoch;
    }
    if (msg.kind == AgentKind::Dozer) dozer_msg = &msg;
  }

  // Dozer priority: its own plan is never modified.
  if (kind_ == AgentKind::Dozer) return self_plan;
  if (dozer_msg == nullptr || self_plan.empty()) return self_plan;

  last_result_ = apply_saw(decode_trajectory(dozer_msg->trajectory), self_plan,
                           specs_, params_);
  return last_result_->dumper;
}

TrajectoryMessage make_message(std::string agent_id, AgentKind kind,
                               const TimedTrajectory& traj, uint64_t epoch) {
  return {std::move(agent_id), kind, encode_trajectory(traj), epoch};
}

}  // namespace sitesim
