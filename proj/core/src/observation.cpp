#include "sitesim/observation.hpp"

#include <algorithm>
#include <cmath>

#include "sitesim/errors.hpp"

namespace sitesim {

double Observation::volume() const {
  double sum = 0.0;
  for (float h : grid) sum += h;
  return sum * resolution * resolution;
}

Observation render_local(const HeightMap& map, const Pose& pose, double fov_side) {
  if (!pose_finite(pose)) throw InvalidTrajectory("render_local: non-finite pose");
  if (fov_side <= 0.0) throw ConfigError("render_local: fov_side must be > 0");

  Observation obs;
  obs.frame = ObservationFrame::DozerLocal;
  obs.resolution = fov_side / static_cast<double>(kObsSide);
  obs.self_pose = pose;
  obs.window_origin = {pose.x - fov_side * 0.5, pose.y - fov_side * 0.5};
  for (size_t r = 0; r < kObsSide; ++r) {
    for (size_t c = 0; c < kObsSide; ++c) {
      obs.at(c, r) = static_cast<float>(map.sample(obs.pixel_center(c, r)));
    }
  }
  return obs;
}

Observation render_global(const HeightMap& map) {
  if (map.empty()) throw ConfigError("render_global: empty map");

  // Square region of side max(w, h) anchored at the map origin, zero-filled
  // past the map edge, so a single resolution value applies to both axes and
  // exact area averaging preserves total volume.
  const double side = std::max(map.world_width(), map.world_height());
  Observation obs;
  obs.frame = ObservationFrame::DumperGlobal;
  obs.resolution = side / static_cast<double>(kObsSide);
  obs.window_origin = map.origin();

  const double res = obs.resolution;
  const double cell = map.cell_size();
  const double inv_px_area = 1.0 / (res * res);
  const long max_col = static_cast<long>(map.width_cells()) - 1;
  const long max_row = static_cast<long>(map.height_cells()) - 1;

  for (size_t r = 0; r < kObsSide; ++r) {
    const double y0 = map.origin().y + static_cast<double>(r) * res;
    const double y1 = y0 + res;
    const long r0 = std::max(0L, static_cast<long>(std::floor((y0 - map.origin().y) / cell)));
    const long r1 = std::min(max_row, static_cast<long>(std::floor((y1 - map.origin().y) / cell - 1e-12)));
    for (size_t c = 0; c < kObsSide; ++c) {
      const double x0 = map.origin().x + static_cast<double>(c) * res;
      const double x1 = x0 + res;
      const long c0 = std::max(0L, static_cast<long>(std::floor((x0 - map.origin().x) / cell)));
      const long c1 = std::min(max_col, static_cast<long>(std::floor((x1 - map.origin().x) / cell - 1e-12)));
      double acc = 0.0;
      for (long rr = r0; rr <= r1; ++rr) {
        const double cy0 = map.origin().y + static_cast<double>(rr) * cell;
        const double oy = std::min(y1, cy0 + cell) - std::max(y0, cy0);
        if (oy <= 0.0) continue;
        for (long cc = c0; cc <= c1; ++cc) {
          const double cx0 = map.origin().x + static_cast<double>(cc) * cell;
          const double ox = std::min(x1, cx0 + cell) - std::max(x0, cx0);
          if (ox <= 0.0) continue;
          acc += map.at(static_cast<size_t>(cc), static_cast<size_t>(rr)) * ox * oy;
        }
      }
      obs.at(c, r) = static_cast<float>(acc * inv_px_area);
    }
  }
  return obs;
}

Observation add_observation_noise(const Observation& obs, const ObservationNoiseParams& params,
                                  RngStream& rng) {
  Observation out = obs;

  // Salt-and-pepper realized as per-pixel spatial swaps: displacement drawn
  // from N(0, sigma_pix^2) per axis, rounded to whole pixels. A permutation of
  // heights, so values stay finite and >= 0 and total mass is unchanged.
  if (params.salt_pepper_sigma > 0.0) {
    const long side = static_cast<long>(kObsSide);
    for (long r = 0; r < side; ++r) {
      for (long c = 0; c < side; ++c) {
        const long dc = std::lround(rng.normal(0.0, params.salt_pepper_sigma));
        const long dr = std::lround(rng.normal(0.0, params.salt_pepper_sigma));
        const long c2 = c + dc;
        const long r2 = r + dr;
        if ((dc == 0 && dr == 0) || c2 < 0 || c2 >= side || r2 < 0 || r2 >= side) continue;
        std::swap(out.grid[static_cast<size_t>(r * side + c)],
                  out.grid[static_cast<size_t>(r2 * side + c2)]);
      }
    }
  }

  // Small Gaussian piles: residue left by previous grading legs.
  if (params.gmm_pile_count > 0 &&
      (params.gmm_pile_mean > 0.0 || params.gmm_pile_sigma > 0.0) &&
      params.gmm_pile_spatial_sigma > 0.0) {
    const long side = static_cast<long>(kObsSide);
    const double s = params.gmm_pile_spatial_sigma;
    const long support = std::max(1L, static_cast<long>(std::ceil(2.5 * s)));
    for (size_t k = 0; k < params.gmm_pile_count; ++k) {
      const long cx = rng.uniform_int(0, side - 1);
      const long cy = rng.uniform_int(0, side - 1);
      const double height = std::max(0.0, rng.normal(params.gmm_pile_mean, params.gmm_pile_sigma));
      for (long r = std::max(0L, cy - support); r <= std::min(side - 1, cy + support); ++r) {
        for (long c = std::max(0L, cx - support); c <= std::min(side - 1, cx + support); ++c) {
          const double d2 = static_cast<double>((r - cy) * (r - cy) + (c - cx) * (c - cx));
          out.grid[static_cast<size_t>(r * side + c)] +=
              static_cast<float>(height * std::exp(-d2 / (2.0 * s * s)));
        }
      }
    }
  }

  return out;
}

}  // namespace sitesim
