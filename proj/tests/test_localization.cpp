#include <doctest.h>

#include <cmath>
#include <vector>

#include "sitesim/localization.hpp"

using namespace sitesim;

namespace {

double std_dev(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(xs.size()));
}

}  // namespace

TEST_CASE("zero parameters are the identity on poses") {
  LocalizationParams params;
  CHECK(params.all_zero());
  RngStream rng(1);
  LocalizationState state = init_error(params, rng);
  CHECK(state.init_pos_offset[0] == 0.0);
  CHECK(state.init_att_offset[2] == 0.0);

  const Pose truth{120.0, 80.0, 0.7, 5.0};
  const NoisyPose noisy = corrupt_pose(truth, state, params, rng);
  CHECK(noisy.measured_pose.x == truth.x);
  CHECK(noisy.measured_pose.y == truth.y);
  CHECK(noisy.measured_pose.heading == truth.heading);
}

TEST_CASE("initialization errors match the paper's magnitudes statistically") {
  // Paper values: [3, 3, 3] m position, [1, 1, 3] deg attitude. Run in cm.
  LocalizationParams params;
  params.init_pos_std = {300.0, 300.0, 300.0};
  params.init_att_std = {1.0, 1.0, 3.0};

  RngStream rng(4242);
  const int n = 10000;
  std::vector<double> px, py, pz, yaw;
  for (int i = 0; i < n; ++i) {
    const LocalizationState s = init_error(params, rng);
    px.push_back(s.init_pos_offset[0]);
    py.push_back(s.init_pos_offset[1]);
    pz.push_back(s.init_pos_offset[2]);
    yaw.push_back(s.init_att_offset[2]);
  }
  CHECK(std_dev(px) == doctest::Approx(300.0).epsilon(0.05));
  CHECK(std_dev(py) == doctest::Approx(300.0).epsilon(0.05));
  CHECK(std_dev(pz) == doctest::Approx(300.0).epsilon(0.05));
  CHECK(std_dev(yaw) == doctest::Approx(3.0 * kPi / 180.0).epsilon(0.05));
}

TEST_CASE("same seed reproduces identical offsets") {
  LocalizationParams params = LocalizationParams::paper_sim(0.02);
  RngStream a(77), b(77);
  const LocalizationState sa = init_error(params, a);
  const LocalizationState sb = init_error(params, b);
  CHECK(sa.init_pos_offset == sb.init_pos_offset);
  CHECK(sa.init_att_offset == sb.init_att_offset);
}

TEST_CASE("aiding noise statistics match configuration") {
  LocalizationParams params;
  params.aiding_pos_std = {3.0, 3.0, 3.0};
  params.aiding_att_std = {1.0, 1.0, 3.0};

  RngStream rng(99);
  LocalizationState state = init_error(params, rng);  // zero init stds
  const Pose truth{100.0, 100.0, 0.0, 0.0};
  const int n = 10000;
  std::vector<double> ex, ey, eyaw;
  for (int i = 0; i < n; ++i) {
    const NoisyPose noisy = corrupt_pose(truth, state, params, rng);
    ex.push_back(noisy.measured_pose.x - truth.x);
    ey.push_back(noisy.measured_pose.y - truth.y);
    eyaw.push_back(noisy.measured_pose.heading - truth.heading);
  }
  CHECK(std_dev(ex) == doctest::Approx(3.0).epsilon(0.05));
  CHECK(std_dev(ey) == doctest::Approx(3.0).epsilon(0.05));
  CHECK(std_dev(eyaw) == doctest::Approx(3.0 * kPi / 180.0).epsilon(0.05));
}

TEST_CASE("every error component stays within its 6-sigma envelope") {
  LocalizationParams params;
  params.init_pos_std = {5.0, 5.0, 5.0};
  params.aiding_pos_std = {5.0, 5.0, 5.0};
  RngStream rng(31337);
  LocalizationState state = init_error(params, rng);
  const Pose truth{100.0, 100.0, 0.0, 0.0};
  for (int i = 0; i < 20000; ++i) {
    const NoisyPose noisy = corrupt_pose(truth, state, params, rng);
    CHECK(std::abs(noisy.measured_pose.x - truth.x) <= 12.0 * 5.0);  // init + aiding
    CHECK(std::isfinite(noisy.measured_pose.heading));
  }
}

TEST_CASE("drift variance grows linearly in time") {
  LocalizationParams params;
  params.drift_rate = 0.5;  // cm per sqrt(s)

  const double t_half = 50.0, t_full = 100.0;
  std::vector<double> at_half, at_full;
  RngStream rng(2718);
  for (int path = 0; path < 1000; ++path) {
    LocalizationState state = init_error(params, rng);
    // Walk the drift forward via repeated measurements.
    for (double t = 0.0; t <= t_full + 1e-9; t += 5.0) {
      const Pose truth{100.0, 100.0, 0.0, t};
      const NoisyPose noisy = corrupt_pose(truth, state, params, rng);
      if (t == t_half) at_half.push_back(noisy.measured_pose.x - truth.x);
      if (t == t_full) at_full.push_back(noisy.measured_pose.x - truth.x);
    }
  }
  const double var_half = std_dev(at_half) * std_dev(at_half);
  const double var_full = std_dev(at_full) * std_dev(at_full);
  CHECK(var_half == doctest::Approx(params.drift_rate * params.drift_rate * t_half).epsilon(0.10));
  CHECK(var_full == doctest::Approx(params.drift_rate * params.drift_rate * t_full).epsilon(0.10));
}

TEST_CASE("observation frame corruption") {
  HeightMap map(250, 250, 1.0);
  add_sand_pile(map, {125.0, 125.0}, 13.0, 10000.0);

  SUBCASE("zero error is the identity") {
    const Pose pose{100.0, 100.0, 0.0, 0.0};
    const Observation local = render_local(map, pose);
    const NoisyPose clean{pose, pose};
    const Observation out = corrupt_observation_frame(map, local, clean);
    CHECK(out.grid == local.grid);

    const Observation global = render_global(map);
    const Observation gout = corrupt_observation_frame(map, global, clean);
    CHECK(gout.grid == global.grid);
  }

  SUBCASE("global map shifts by the planar error in whole pixels") {
    const Observation global = render_global(map);
    Pose measured{100.0 + 10.0, 100.0, 0.0, 0.0};
    const NoisyPose noisy{{100.0, 100.0, 0.0, 0.0}, measured};
    const Observation shifted = corrupt_observation_frame(map, global, noisy);

    const long px = static_cast<long>(std::floor(10.0 / global.resolution));
    CHECK(px == 3);
    for (size_t r = 0; r < kObsSide; ++r) {
      for (size_t c = static_cast<size_t>(px); c < kObsSide; ++c) {
        CHECK(shifted.at(c, r) ==
              doctest::Approx(global.at(c - static_cast<size_t>(px), r)));
      }
      for (size_t c = 0; c < static_cast<size_t>(px); ++c)
        CHECK(shifted.at(c, r) == 0.0f);  // exposed edge zero-fills
    }
  }

  SUBCASE("dozer window re-renders at the measured pose") {
    const Pose truth{125.0, 125.0, 0.0, 0.0};
    Pose measured = truth;
    measured.x += 20.0;
    const NoisyPose noisy{truth, measured};
    const Observation at_true = render_local(map, truth);
    const Observation corrupted = corrupt_observation_frame(map, at_true, noisy);
    const Observation oracle = render_local(map, measured);
    CHECK(corrupted.grid == oracle.grid);
    CHECK(corrupted.self_pose.x == doctest::Approx(measured.x));
  }
}
