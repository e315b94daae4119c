#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sitesim/agents.hpp"
#include "sitesim/trajectory.hpp"

namespace sitesim {

// Immutable published plan. Agents coordinate only through these messages;
// there is no central arbiter.
struct TrajectoryMessage {
  std::string agent_id;
  AgentKind kind = AgentKind::Dozer;
  EncodedTrajectory trajectory{};
  uint64_t plan_epoch = 0;
};

struct ConflictReport {
  bool conflict = false;
  double first_conflict_time = 0.0;  // meaningful only when conflict
  Vec2 conflict_point;               // dumper position at that time

  explicit operator bool() const { return conflict; }
};

struct SawParams {
  double safety_margin = 10.0;  // cm clearance between footprints
  double check_dt = 0.1;        // s sampling interval
  double hold_increment = 1.0;  // s
  double max_hold = 120.0;      // s
  // When no hold satisfies the full margin, retry at this contact margin
  // before giving up: grazing past at reduced clearance beats driving into
  // the swept lane.
  double pinned_margin = 1.0;

  void validate() const {
    if (safety_margin <= 0.0 || check_dt <= 0.0 || hold_increment <= 0.0 || max_hold <= 0.0)
      throw ConfigError("SawParams must all be > 0");
    if (pinned_margin <= 0.0 || pinned_margin > safety_margin)
      throw ConfigError("pinned_margin must be in (0, safety_margin]");
  }
};

struct AgentSpecs {
  AgentSpec dozer = AgentSpec::dozer();
  AgentSpec dumper = AgentSpec::dumper();
};

/// Space-time conflict scan: samples both trajectories every check_dt over
/// the union of their time spans (an agent whose trajectory has not started
/// or has ended is held at its endpoint pose) and reports the earliest time
/// the inflated footprints overlap. The margin is inflated by
/// (speed_a + speed_b) * check_dt / 2 against tunneling between samples.
ConflictReport detect_conflict(const TimedTrajectory& dozer_traj,
                               const TimedTrajectory& dumper_traj,
                               const AgentSpecs& specs, const SawParams& params);

struct SawResult {
  TimedTrajectory dozer;   // always the input, bit-identical (dozer priority)
  TimedTrajectory dumper;  // possibly time-shifted
  bool modified = false;
  double hold_seconds = 0.0;
  // Fully resolved: the pair is conflict-free over the whole sampled horizon.
  bool resolved = true;
  // Ghost exposure: the pair is conflict-free while the dozer's plan is
  // live; the only residual conflict is against the dozer held at its final
  // pose after its plan ends, which the dozer's next publication supersedes.
  bool ghost_only = false;
  // The hold only satisfies the reduced pinned_margin, not the full one.
  bool margin_degraded = false;
};

/// Asymmetric stop-and-wait: the dozer's plan is never altered. On conflict,
/// the dumper's timestamps from the waypoint immediately preceding the first
/// conflict onward are delayed by the smallest multiple of hold_increment
/// (up to max_hold) that clears the conflict; if no wait at that waypoint is
/// safe (the dozer sweeps it later), the hold point retreats toward the leg
/// start; failing everything, the dumper waits out the dozer's whole plan
/// plus one increment. The dumper's (x, y) sequence is preserved; only
/// timestamps change.
SawResult apply_saw(const TimedTrajectory& dozer_traj, const TimedTrajectory& dumper_traj,
                    const AgentSpecs& specs, const SawParams& params);

// Per-agent decentralized arbitration endpoint. Keeps the last seen epoch per
// peer so regressed (stale) messages are rejected.
class Coordinator {
 public:
  Coordinator(std::string self_id, AgentKind kind, AgentSpecs specs, SawParams params);

  /// Exactly one arbitration round over a snapshot inbox. A dozer returns
  /// self_plan unchanged (priority); a dumper applies stop-and-wait against
  /// the published dozer plan. Throws StalePlan if a message's epoch
  /// regressed below one already seen.
  TimedTrajectory round(const std::vector<TrajectoryMessage>& published,
                        const TimedTrajectory& self_plan);

  /// Result of the last round's arbitration, when one ran.
  const std::optional<SawResult>& last_result() const { return last_result_; }

 private:
  std::string self_id_;
  AgentKind kind_;
  AgentSpecs specs_;
  SawParams params_;
  std::unordered_map<std::string, uint64_t> seen_epochs_;
  std::optional<SawResult> last_result_;
};

TrajectoryMessage make_message(std::string agent_id, AgentKind kind,
                               const TimedTrajectory& traj, uint64_t epoch);

}  // namespace sitesim
