#include "sitesim/episode.hpp"

#include <algorithm>
#include <cmath>

#include "sitesim/coordination.hpp"
#include "sitesim/localization.hpp"
#include "sitesim/rng.hpp"

namespace sitesim {

namespace {

constexpr double kReplanBackoff = 2.0;  // s between retries once a policy is done

// The executed path under localization error: the vehicle steers to its plan
// in the frame it believes in, so the true track is the plan shifted by the
// planning-time error. Coordinates clamp at 0 to stay encodable.
DriveCommand shift_planar(const DriveCommand& cmd, double dx, double dy) {
  DriveCommand out;
  for (const Waypoint& wp : cmd.trajectory.waypoints()) {
    out.trajectory.append({std::max(0.0f, static_cast<float>(wp.x + dx)),
                           std::max(0.0f, static_cast<float>(wp.y + dy)), wp.t});
  }
  out.reverse_gear = cmd.reverse_gear;
  out.final_facing = cmd.final_facing;
  return out;
}

// Attach the gear annotations of the original plan to its stop-and-wait
// modified version: the waypoint count and (x, y) sequence are unchanged by
// the time shift, so the per-index gear still applies.
DriveCommand with_gear_of(const TimedTrajectory& traj, const DriveCommand& source) {
  DriveCommand out(traj);
  if (source.annotated() && source.trajectory.size() == traj.size())
    out.reverse_gear = source.reverse_gear;
  out.final_facing = source.final_facing;
  return out;
}

// Retimes a plan to depart immediately at the agent's top speed, collapsing
// holds inherited from superseded arbitrations: each fresh dozer publication
// re-derives whatever delay it actually needs.
DriveCommand expedite(const DriveCommand& cmd, const AgentSpec& spec) {
  if (cmd.trajectory.size() < 2) return cmd;
  DriveCommand out;
  out.reverse_gear = cmd.reverse_gear;
  out.final_facing = cmd.final_facing;
  double t = cmd.trajectory[0].t;
  out.trajectory.append(cmd.trajectory[0]);
  for (size_t i = 1; i < cmd.trajectory.size(); ++i) {
    const Waypoint& prev = cmd.trajectory[i - 1];
    const Waypoint& wp = cmd.trajectory[i];
    const double dist = std::hypot(static_cast<double>(wp.x) - prev.x,
                                   static_cast<double>(wp.y) - prev.y);
    t += std::max(0.25, dist / spec.speed);
    out.trajectory.append({wp.x, wp.y, static_cast<float>(t)});
  }
  return out;
}

// Suffix of an active plan from `now` on, re-anchored at the interpolated
// current position, so holds can only delay what is still ahead.
DriveCommand remaining_plan(const DriveCommand& cmd, double now) {
  const TimedTrajectory& traj = cmd.trajectory;
  if (traj.empty() || now >= traj.end_time()) return {};
  DriveCommand out;
  const Vec2 p = traj.position_at(now);
  out.trajectory.append({std::max(0.0f, static_cast<float>(p.x)),
                         std::max(0.0f, static_cast<float>(p.y)),
                         static_cast<float>(now)});
  out.reverse_gear.push_back(0);
  for (size_t i = 0; i < traj.size(); ++i) {
    if (traj[i].t > now + 1e-4) {
      out.trajectory.append(traj[i]);
      out.reverse_gear.push_back(cmd.annotated() ? cmd.reverse_gear[i] : 0);
    }
  }
  if (!cmd.annotated()) out.reverse_gear.clear();
  out.final_facing = cmd.final_facing;
  return out.trajectory.size() >= 2 ? out : DriveCommand{};
}

struct AgentContext {
  AgentKind kind;
  RngStream loc_rng;
  RngStream obs_rng;
  LocalizationState loc_state;
  DriveCommand planned;   // believed frame (published)
  DriveCommand executed;  // true frame
  uint64_t epoch = 0;
  double backoff_until = -1.0;
  bool done = false;
};

}  // namespace

EpisodeResult run_episode(SiteState state, const ScenarioConfig& config, Mode mode,
                          uint64_t episode_index, const EpisodeOptions& options) {
  const bool active_dozer = mode != Mode::DumperOnly;
  const bool active_dumper = mode != Mode::DozerOnly;
  const bool coordinated =
      mode == Mode::Saw || mode == Mode::SawLocNoise || mode == Mode::SawLocAware;
  const bool loc_enabled = mode == Mode::SawLocNoise || mode == Mode::SawLocAware;

  SawParams saw = config.saw;
  if (mode == Mode::SawLocAware) saw.safety_margin += config.aware_margin_boost;
  const AgentSpecs specs{config.dozer_spec, config.dumper_spec};

  StepParams step_params;
  step_params.dozer_spec = config.dozer_spec;
  step_params.dumper_spec = config.dumper_spec;
  step_params.spread = config.spread;

  DozerExpert default_dozer(config.dozer_spec, config.dozer_expert);
  DumperExpert default_dumper(config.dumper_spec, config.spread, config.dumper_expert);
  Policy* dozer_policy = options.dozer_policy ? options.dozer_policy : &default_dozer;
  Policy* dumper_policy = options.dumper_policy ? options.dumper_policy : &default_dumper;

  const uint64_t seed = config.seed;
  auto stream = [&](const char* purpose, uint64_t agent) {
    return RngStream::derive(seed, {episode_index, RngStream::hash_label(purpose), agent});
  };

  AgentContext dozer{AgentKind::Dozer, stream("loc", 0), stream("obsnoise", 0), {}, {}, {}, 0, -1.0, false};
  AgentContext dumper{AgentKind::Dumper, stream("loc", 1), stream("obsnoise", 1), {}, {}, {}, 0, -1.0, false};
  if (loc_enabled) {
    dozer.loc_state = init_error(config.localization, dozer.loc_rng);
    dumper.loc_state = init_error(config.localization, dumper.loc_rng);
  }

  Coordinator coordinator("dumper", AgentKind::Dumper, specs, saw);
  TrajectoryMessage dozer_msg;
  bool have_dozer_msg = false;

  EpisodeMetrics metrics;
  metrics.episode_seed = episode_seed(seed, episode_index);
  metrics.scenario_fingerprint = scenario_hash(state);

  if (options.log != nullptr) {
    options.log->map_width = state.map.width_cells();
    options.log->map_height = state.map.height_cells();
    options.log->cell_size = state.map.cell_size();
  }

  size_t plan_step = 0;
  double last_dumped = state.total_dumped;

  auto snapshot_terrain = [&](size_t step_idx) {
    if (options.log == nullptr) return;
    EpisodeLog::Snapshot snap;
    snap.step = step_idx;
    snap.grid.reserve(state.map.heights().size());
    for (double v : state.map.heights()) snap.grid.push_back(static_cast<float>(v));
    options.log->snapshots.push_back(std::move(snap));
  };

  // Plans one leg for an agent; returns the (believed-frame) plan and fills
  // the observation/pose context needed for dataset records.
  struct PlanOutput {
    DriveCommand plan;
    Observation clean_obs;
    Observation planning_obs;
    NoisyPose noisy;
  };
  auto plan_for = [&](AgentContext& agent) {
    PlanOutput out;
    const Pose true_pose = agent.kind == AgentKind::Dozer ? state.dozer : state.dumper;
    out.noisy = {true_pose, true_pose};
    if (loc_enabled) {
      out.noisy = corrupt_pose(true_pose, agent.loc_state, config.localization, agent.loc_rng);
      // The vehicle can only believe itself somewhere on the site; planning
      // from an off-site pose would emit unencodable waypoints.
      out.noisy.measured_pose.x =
          std::clamp(out.noisy.measured_pose.x, 0.0,
                     state.map.origin().x + state.map.world_width() - 1e-3);
      out.noisy.measured_pose.y =
          std::clamp(out.noisy.measured_pose.y, 0.0,
                     state.map.origin().y + state.map.world_height() - 1e-3);
    }

    out.clean_obs = agent.kind == AgentKind::Dozer
                        ? render_local(state.map, true_pose, config.dozer_expert.fov_side)
                        : render_global(state.map);
    out.clean_obs.self_pose = true_pose;
    out.clean_obs.other_pose = agent.kind == AgentKind::Dozer ? state.dumper : state.dozer;

    out.planning_obs = loc_enabled
                           ? corrupt_observation_frame(state.map, out.clean_obs, out.noisy)
                           : out.clean_obs;
    out.planning_obs.self_pose = out.noisy.measured_pose;
    out.planning_obs.other_pose = out.clean_obs.other_pose;

    Policy* policy = agent.kind == AgentKind::Dozer ? dozer_policy : dumper_policy;
    out.plan = policy->plan_drive(out.planning_obs, state);
    return out;
  };

  auto emit_record = [&](AgentContext& agent, const PlanOutput& planned,
                         const TimedTrajectory& modified, bool doomed) {
    if (options.log != nullptr) {
      options.log->plans.push_back(
          {options.log->steps.size(), agent.kind, modified});
    }
    if (!options.plan_sink) return;
    PlanRecord record;
    record.episode = episode_index;
    record.step_index = plan_step++;
    record.agent = agent.kind;
    record.clean_obs = planned.clean_obs;
    record.noisy_obs = add_observation_noise(planned.planning_obs, config.noise, agent.obs_rng);
    record.true_pose = planned.noisy.true_pose;
    record.measured_pose = planned.noisy.measured_pose;
    record.expert_trajectory = encode_trajectory(planned.plan.trajectory);
    record.modified_trajectory = encode_trajectory(modified);
    record.end_mask = end_of_leg_mask(modified);
    record.doomed = doomed;
    options.plan_sink(record);
  };

  // Runs the stop-and-wait round for a dumper candidate; returns what the
  // dumper actually adopts.
  auto arbitrate = [&](const TimedTrajectory& candidate, bool& doomed) {
    doomed = false;
    if (!coordinated || !have_dozer_msg || candidate.empty()) return candidate;
    const TimedTrajectory adopted = coordinator.round({dozer_msg}, candidate);
    const auto& result = coordinator.last_result();
    if (options.log != nullptr && result.has_value()) {
      options.log->arbitrations.push_back(
          {state.clock, result->modified || !result->resolved, result->hold_seconds,
           result->resolved, result->ghost_only, result->margin_degraded});
    }
    if (!result.has_value()) return candidate;
    if (result->margin_degraded) {
      // No full-margin wait exists; the adopted hold only guarantees the
      // contact margin. Not clean expert supervision, so flag it.
      metrics.doomed_arbitrations += 1;
      doomed = true;
    }
    if (result->modified && !result->margin_degraded) {
      metrics.saw_modifications += 1;
      const TimedTrajectory dozer_plan = decode_trajectory(dozer_msg.trajectory);
      const ConflictReport check = detect_conflict(dozer_plan, adopted, specs, saw);
      // Safety postcondition: the adopted pair must be clean over the whole
      // horizon when fully resolved, and over the dozer's live plan always.
      const bool live_conflict =
          check.conflict && check.first_conflict_time <= dozer_plan.end_time() + 1e-9;
      if (live_conflict || (result->resolved && check.conflict))
        metrics.saw_violations += 1;
    }
    return adopted;
  };

  const size_t max_steps =
      static_cast<size_t>(std::llround(config.timeout / config.dt));
  snapshot_terrain(0);

  bool success = false;
  for (size_t step_idx = 0; step_idx < max_steps; ++step_idx) {
    const double now = state.clock;
    bool dozer_replanned = false;

    // Dozer leg boundary: plan and publish. Its plan is never modified.
    if (active_dozer && now >= dozer.backoff_until &&
        (dozer.executed.empty() || now >= dozer.executed.trajectory.end_time() - 1e-9)) {
      PlanOutput planned = plan_for(dozer);
      if (planned.plan.empty()) {
        dozer.done = true;
        dozer.planned = {};
        dozer.executed = {};
        dozer.backoff_until = now + kReplanBackoff;
      } else {
        dozer.done = false;
        dozer.planned = planned.plan;
        const double ex = planned.noisy.true_pose.x - planned.noisy.measured_pose.x;
        const double ey = planned.noisy.true_pose.y - planned.noisy.measured_pose.y;
        dozer.executed = loc_enabled ? shift_planar(planned.plan, ex, ey) : planned.plan;
        dozer.epoch += 1;
        dozer_msg =
            make_message("dozer", AgentKind::Dozer, dozer.planned.trajectory, dozer.epoch);
        have_dozer_msg = true;
        dozer_replanned = true;
        emit_record(dozer, planned, planned.plan.trajectory, false);
      }
    }

    // Dumper: fresh leg at its own boundary, or a re-arbitration of the
    // remaining plan when the dozer just published a new trajectory.
    if (active_dumper) {
      const bool leg_boundary =
          now >= dumper.backoff_until &&
          (dumper.executed.empty() || now >= dumper.executed.trajectory.end_time() - 1e-9);
      if (leg_boundary) {
        PlanOutput planned = plan_for(dumper);
        if (planned.plan.empty()) {
          dumper.done = true;
          dumper.planned = {};
          dumper.executed = {};
          dumper.backoff_until = now + kReplanBackoff;
        } else {
          dumper.done = false;
          bool doomed = false;
          const TimedTrajectory adopted = arbitrate(planned.plan.trajectory, doomed);
          dumper.planned = with_gear_of(adopted, planned.plan);
          const double ex = planned.noisy.true_pose.x - planned.noisy.measured_pose.x;
          const double ey = planned.noisy.true_pose.y - planned.noisy.measured_pose.y;
          dumper.executed = loc_enabled ? shift_planar(dumper.planned, ex, ey) : dumper.planned;
          dumper.epoch += 1;
          emit_record(dumper, planned, adopted, doomed);
        }
      } else if (coordinated && dozer_replanned && !dumper.planned.empty() &&
                 now < dumper.planned.trajectory.end_time()) {
        const DriveCommand rest =
            expedite(remaining_plan(dumper.planned, now), config.dumper_spec);
        if (!rest.empty()) {
          bool doomed = false;
          const TimedTrajectory adopted = arbitrate(rest.trajectory, doomed);
          const double ex = state.dumper.x - rest.trajectory[0].x;
          const double ey = state.dumper.y - rest.trajectory[0].y;
          dumper.planned = with_gear_of(adopted, rest);
          dumper.executed = loc_enabled ? shift_planar(dumper.planned, ex, ey) : dumper.planned;
        }
      }
    }

    step(state, dozer.executed, dumper.executed, config.dt, step_params);

    if (options.log != nullptr) {
      options.log->steps.push_back({state.clock, state.dozer, state.dumper});
      if (options.log->snapshot_stride > 0 &&
          (step_idx + 1) % options.log->snapshot_stride == 0)
        snapshot_terrain(step_idx + 1);
    }

    // Fresh sand re-opens the dozer's work queue.
    if (state.total_dumped != last_dumped) {
      last_dumped = state.total_dumped;
      dozer.done = false;
      dozer.backoff_until = -1.0;
    }

    if (active_dozer && active_dumper &&
        check_footprint_collision(state.dozer, config.dozer_spec, state.dumper,
                                  config.dumper_spec, 0.0)) {
      metrics.collided = true;
      break;
    }

    const bool route_ok = !active_dumper || dumper.done;
    const bool grade_ok = !active_dozer || dozer.done;
    if (route_ok && grade_ok) {
      if (!active_dozer ||
          uncleared_fraction(state, state.total_dumped) <= config.done_threshold) {
        metrics.completion_time = state.clock;
        success = true;
        break;
      }
    }
  }
  (void)success;

  metrics.uncleared = uncleared_fraction(state, state.total_dumped);
  metrics.total_dumped = state.total_dumped;
  return {metrics, std::move(state)};
}

EpisodeResult run_episode(const ScenarioConfig& config, Mode mode, uint64_t episode_index,
                          const EpisodeOptions& options) {
  return run_episode(generate_scenario(config, episode_index), config, mode,
                     episode_index, options);
}

}  // namespace sitesim
