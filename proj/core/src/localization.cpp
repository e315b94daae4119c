#include "sitesim/localization.hpp"

#include <algorithm>
#include <cmath>

namespace sitesim {

namespace {

constexpr double kDegToRad = kPi / 180.0;

double clamped_normal(RngStream& rng, double std_dev) {
  if (std_dev <= 0.0) return 0.0;
  return std::clamp(rng.normal(0.0, std_dev), -6.0 * std_dev, 6.0 * std_dev);
}

}  // namespace

bool LocalizationParams::all_zero() const {
  auto zero = [](const Vec3& v) { return v[0] == 0.0 && v[1] == 0.0 && v[2] == 0.0; };
  return zero(init_pos_std) && zero(init_vel_std) && zero(init_att_std) &&
         zero(aiding_pos_std) && zero(aiding_att_std) && drift_rate == 0.0;
}

LocalizationParams LocalizationParams::paper_sim(double length_scale) {
  LocalizationParams p;
  const double m = 100.0 * length_scale;  // paper magnitudes are meters
  p.init_pos_std = {3.0 * m, 3.0 * m, 3.0 * m};
  p.init_vel_std = {0.1 * m, 0.1 * m, 0.1 * m};
  p.init_att_std = {1.0, 1.0, 3.0};
  p.aiding_pos_std = {3.0 * m, 3.0 * m, 3.0 * m};
  p.aiding_att_std = {1.0, 1.0, 3.0};
  p.sensor_rate = 100.0;
  return p;
}

LocalizationState init_error(const LocalizationParams& params, RngStream& rng) {
  LocalizationState s;
  for (int i = 0; i < 3; ++i) s.init_pos_offset[i] = clamped_normal(rng, params.init_pos_std[i]);
  for (int i = 0; i < 3; ++i) s.init_vel_offset[i] = clamped_normal(rng, params.init_vel_std[i]);
  for (int i = 0; i < 3; ++i)
    s.init_att_offset[i] = clamped_normal(rng, params.init_att_std[i] * kDegToRad);
  return s;
}

NoisyPose corrupt_pose(const Pose& true_pose, LocalizationState& state,
                       const LocalizationParams& params, RngStream& rng) {
  // Random-walk drift: variance grows linearly with elapsed time.
  if (!state.drift_started) {
    state.drift_started = true;
    state.last_time = true_pose.t;
  } else if (true_pose.t > state.last_time && params.drift_rate > 0.0) {
    const double dt = true_pose.t - state.last_time;
    const double std_dev = params.drift_rate * std::sqrt(dt);
    for (int i = 0; i < 3; ++i) state.drift[i] += rng.normal(0.0, std_dev);
    state.last_time = true_pose.t;
  } else {
    state.last_time = std::max(state.last_time, true_pose.t);
  }

  Vec3 aiding_pos{}, aiding_att{};
  for (int i = 0; i < 3; ++i) aiding_pos[i] = clamped_normal(rng, params.aiding_pos_std[i]);
  for (int i = 0; i < 3; ++i)
    aiding_att[i] = clamped_normal(rng, params.aiding_att_std[i] * kDegToRad);

  NoisyPose out;
  out.true_pose = true_pose;
  out.measured_pose = true_pose;
  out.measured_pose.x += state.init_pos_offset[0] + state.drift[0] + aiding_pos[0];
  out.measured_pose.y += state.init_pos_offset[1] + state.drift[1] + aiding_pos[1];
  out.measured_pose.heading =
      wrap_angle(true_pose.heading + state.init_att_offset[2] + aiding_att[2]);
  return out;
}

Observation corrupt_observation_frame(const HeightMap& map, const Observation& obs,
                                      const NoisyPose& noisy) {
  if (obs.frame == ObservationFrame::DozerLocal) {
    // The agent renders the window around where it believes it stands.
    const double fov = obs.resolution * static_cast<double>(kObsSide);
    return render_local(map, noisy.measured_pose, fov);
  }

  // Dumper-global: the whole rendered map shifts by the planar error.
  Observation out = obs;
  out.self_pose = noisy.measured_pose;
  const double err_x = noisy.measured_pose.x - noisy.true_pose.x;
  const double err_y = noisy.measured_pose.y - noisy.true_pose.y;
  const long shift_c = static_cast<long>(std::floor(err_x / obs.resolution));
  const long shift_r = static_cast<long>(std::floor(err_y / obs.resolution));
  if (shift_c == 0 && shift_r == 0) return out;

  out.grid.fill(0.0f);
  const long side = static_cast<long>(kObsSide);
  for (long r = 0; r < side; ++r) {
    const long src_r = r - shift_r;
    if (src_r < 0 || src_r >= side) continue;
    for (long c = 0; c < side; ++c) {
      const long src_c = c - shift_c;
      if (src_c < 0 || src_c >= side) continue;
      out.grid[static_cast<size_t>(r * side + c)] =
          obs.grid[static_cast<size_t>(src_r * side + src_c)];
    }
  }
  return out;
}

}  // namespace sitesim
