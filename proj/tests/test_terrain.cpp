#include <doctest.h>

#include <cmath>

#include "sitesim/errors.hpp"
#include "sitesim/height_map.hpp"
#include "sitesim/observation.hpp"
#include "sitesim/rng.hpp"

using namespace sitesim;

namespace {

HeightMap flat_map(size_t side, double height) {
  return HeightMap(side, side, 1.0, {0.0, 0.0}, height);
}

}  // namespace

TEST_CASE("render_local on a constant field") {
  const HeightMap map = flat_map(250, 5.0);
  const Observation obs = render_local(map, {100.0, 120.0, 0.3, 0.0});
  CHECK(obs.resolution == doctest::Approx(1.0));
  for (float v : obs.grid) CHECK(v == doctest::Approx(5.0));
}

TEST_CASE("render_local rejects non-finite poses") {
  const HeightMap map = flat_map(100, 0.0);
  CHECK_THROWS_AS(render_local(map, {std::nan(""), 10.0, 0.0, 0.0}), InvalidTrajectory);
}

TEST_CASE("render_local at the map corner zero-fills out-of-bounds pixels") {
  HeightMap map = flat_map(250, 2.0);
  map.at(3, 5) = 9.0;
  const Pose pose{0.0, 0.0, 0.0, 0.0};
  const Observation obs = render_local(map, pose);

  // Direct per-pixel lookup oracle.
  for (size_t r = 0; r < kObsSide; ++r) {
    for (size_t c = 0; c < kObsSide; ++c) {
      const Vec2 p = obs.pixel_center(c, r);
      const double expected = map.in_bounds(p) ? map.at(map.col_of(p.x), map.row_of(p.y)) : 0.0;
      CHECK(obs.at(c, r) == doctest::Approx(expected));
    }
  }
  CHECK(obs.at(0, 0) == doctest::Approx(0.0));  // outside the map
}

TEST_CASE("render_local centers the window on the pose") {
  HeightMap map = flat_map(250, 0.0);
  const Pose pose{125.0, 125.0, 0.0, 0.0};
  map.at(map.col_of(pose.x), map.row_of(pose.y)) = 7.5;
  const Observation obs = render_local(map, pose);
  CHECK(obs.at(kObsSide / 2, kObsSide / 2) == doctest::Approx(7.5));
}

TEST_CASE("render_local matches the nearest-cell oracle on random poses") {
  RngStream rng(2024);
  HeightMap map = flat_map(250, 0.0);
  for (int i = 0; i < 40; ++i)
    map.at(static_cast<size_t>(rng.uniform_int(0, 249)),
           static_cast<size_t>(rng.uniform_int(0, 249))) = rng.uniform(0.0, 20.0);

  for (int trial = 0; trial < 100; ++trial) {
    const Pose pose{rng.uniform(0.0, 250.0), rng.uniform(0.0, 250.0),
                    rng.uniform(-kPi, kPi), 0.0};
    const Observation obs = render_local(map, pose);
    for (size_t r = 0; r < kObsSide; r += 7) {
      for (size_t c = 0; c < kObsSide; c += 7) {
        const Vec2 p = obs.pixel_center(c, r);
        const double expected = map.sample(p);
        CHECK(obs.at(c, r) == doctest::Approx(expected));
      }
    }
  }
}

TEST_CASE("render_global resolution on the 250 cm lab site") {
  const HeightMap map = flat_map(250, 1.0);
  const Observation obs = render_global(map);
  CHECK(obs.resolution == doctest::Approx(250.0 / 85.0).epsilon(1e-9));
  CHECK(obs.frame == ObservationFrame::DumperGlobal);
}

TEST_CASE("render_global of a constant map is constant") {
  const HeightMap map = flat_map(250, 3.25);
  const Observation obs = render_global(map);
  for (float v : obs.grid) CHECK(v == doctest::Approx(3.25).epsilon(1e-6));
}

TEST_CASE("render_global preserves volume") {
  SUBCASE("single 10 cm pile") {
    HeightMap map = flat_map(250, 0.0);
    add_sand_pile(map, {80.0, 140.0}, 13.0, 10000.0);
    const Observation obs = render_global(map);
    const double map_volume = map.total_volume();
    CHECK(std::abs(obs.volume() - map_volume) / map_volume <= 0.005);
  }
  SUBCASE("random rough terrain, including a non-square site") {
    RngStream rng(7);
    HeightMap map(200, 160, 1.0);
    for (size_t r = 0; r < map.height_cells(); ++r)
      for (size_t c = 0; c < map.width_cells(); ++c) map.at(c, r) = rng.uniform(0.0, 4.0);
    const Observation obs = render_global(map);
    const double map_volume = map.total_volume();
    CHECK(std::abs(obs.volume() - map_volume) / map_volume <= 0.005);
  }
}

TEST_CASE("observation noise with zero params is the identity") {
  HeightMap map = flat_map(120, 0.0);
  add_sand_pile(map, {60.0, 60.0}, 12.0, 5000.0);
  const Observation obs = render_local(map, {60.0, 60.0, 0.0, 0.0});

  ObservationNoiseParams zero;
  zero.salt_pepper_sigma = 0.0;
  zero.gmm_pile_mean = 0.0;
  zero.gmm_pile_sigma = 0.0;
  zero.gmm_pile_count = 0;
  CHECK(zero.all_zero());

  RngStream rng(5);
  const Observation noised = add_observation_noise(obs, zero, rng);
  CHECK(noised.grid == obs.grid);
}

TEST_CASE("observation noise is deterministic given the stream") {
  HeightMap map = flat_map(120, 1.0);
  const Observation obs = render_local(map, {60.0, 60.0, 0.0, 0.0});
  const ObservationNoiseParams params;  // defaults: 2 px, (3, 2) cm, 5 bumps

  RngStream rng_a(77);
  RngStream rng_b(77);
  const Observation a = add_observation_noise(obs, params, rng_a);
  const Observation b = add_observation_noise(obs, params, rng_b);
  CHECK(a.grid == b.grid);

  bool changed = false;
  for (size_t i = 0; i < kObsCells; ++i) changed = changed || a.grid[i] != obs.grid[i];
  CHECK(changed);
}

TEST_CASE("gmm bump heights follow the configured distribution") {
  // Monte-Carlo oracle: a single bump on a zero grid puts exactly the drawn
  // height (clamped at 0) into the bump's center pixel, so the peak readout
  // recovers the draw. E[max(0, N(3, 2^2))] = 3.0586, inside [2.9, 3.1].
  HeightMap map = flat_map(120, 0.0);
  const Observation zero_obs = render_local(map, {60.0, 60.0, 0.0, 0.0});

  ObservationNoiseParams params;
  params.salt_pepper_sigma = 0.0;
  params.gmm_pile_count = 1;

  RngStream rng(20240817);
  double sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const Observation noised = add_observation_noise(zero_obs, params, rng);
    float peak = 0.0f;
    for (float v : noised.grid) peak = std::max(peak, v);
    sum += peak;
  }
  const double mean = sum / n;
  CHECK(mean >= 2.9);
  CHECK(mean <= 3.1);
}

TEST_CASE("noised heights stay finite and non-negative") {
  HeightMap map = flat_map(120, 0.0);
  add_sand_pile(map, {40.0, 80.0}, 10.0, 8000.0);
  const Observation obs = render_local(map, {60.0, 60.0, 0.0, 0.0});
  const ObservationNoiseParams params;
  RngStream rng(3);
  for (int i = 0; i < 50; ++i) {
    const Observation noised = add_observation_noise(obs, params, rng);
    for (float v : noised.grid) {
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0f);
    }
  }
}

TEST_CASE("salt-and-pepper swaps preserve total mass") {
  HeightMap map = flat_map(120, 0.0);
  add_sand_pile(map, {60.0, 60.0}, 14.0, 9000.0);
  const Observation obs = render_local(map, {60.0, 60.0, 0.0, 0.0});
  ObservationNoiseParams params;
  params.gmm_pile_count = 0;  // swaps only
  RngStream rng(11);
  const Observation noised = add_observation_noise(obs, params, rng);
  CHECK(noised.volume() == doctest::Approx(obs.volume()).epsilon(1e-9));
}

TEST_CASE("sand pile keeps its volume when clipped at the site edge") {
  HeightMap map = flat_map(250, 0.0);
  const double before = map.total_volume();
  add_sand_pile(map, {2.0, 2.0}, 13.0, 10000.0);  // corner: support clipped
  CHECK(map.total_volume() - before == doctest::Approx(10000.0).epsilon(1e-6));
}
