#pragma once

#include <array>

#include "sitesim/geometry.hpp"
#include "sitesim/height_map.hpp"
#include "sitesim/observation.hpp"
#include "sitesim/rng.hpp"

namespace sitesim {

using Vec3 = std::array<double, 3>;

// Localization-error model: a per-episode constant initialization offset,
// fresh zero-mean Gaussian aiding-sensor noise per measurement, and a slow
// position random walk. Full inertial mechanization is abstracted away; only
// the planar components (x, y, yaw) reach the 2-D world, the z channels are
// drawn to keep the configured 3-vectors meaningful.
struct LocalizationParams {
  Vec3 init_pos_std{0.0, 0.0, 0.0};    // cm
  Vec3 init_vel_std{0.0, 0.0, 0.0};    // cm/s
  Vec3 init_att_std{0.0, 0.0, 0.0};    // deg, (roll, pitch, yaw)
  Vec3 aiding_pos_std{0.0, 0.0, 0.0};  // cm
  Vec3 aiding_att_std{0.0, 0.0, 0.0};  // deg
  double drift_rate = 0.0;             // cm per sqrt(s)
  double sensor_rate = 100.0;          // Hz

  bool all_zero() const;

  /// The paper's simulation magnitudes (position/velocity in meters there)
  /// scaled onto a site of a different size; angles do not scale.
  static LocalizationParams paper_sim(double length_scale);
};

struct NoisyPose {
  Pose true_pose;
  Pose measured_pose;
};

// Per-episode, per-agent error state: the initialization offsets stay fixed
// for the episode, the drift accumulates between measurements.
struct LocalizationState {
  Vec3 init_pos_offset{0.0, 0.0, 0.0};
  Vec3 init_vel_offset{0.0, 0.0, 0.0};
  Vec3 init_att_offset{0.0, 0.0, 0.0};  // rad
  Vec3 drift{0.0, 0.0, 0.0};
  double last_time = 0.0;
  bool drift_started = false;
};

/// Draw the per-episode constant initialization offsets.
LocalizationState init_error(const LocalizationParams& params, RngStream& rng);

/// measured = true + init offset + accumulated drift + fresh aiding noise.
/// Each noise component is clamped to 6 sigma of its own configured std.
/// Advances the drift random walk by the time elapsed since the last call.
NoisyPose corrupt_pose(const Pose& true_pose, LocalizationState& state,
                       const LocalizationParams& params, RngStream& rng);

/// Rebuild the observation as the agent would see it from its measured pose:
/// dozer-local windows are re-rendered at the measured pose; dumper-global
/// grids are translated by the planar position error with zero fill.
Observation corrupt_observation_frame(const HeightMap& map, const Observation& obs,
                                      const NoisyPose& noisy);

}  // namespace sitesim
