#pragma once

#include <array>
#include <cstddef>

#include "sitesim/geometry.hpp"
#include "sitesim/height_map.hpp"
#include "sitesim/rng.hpp"

namespace sitesim {

inline constexpr size_t kObsSide = 85;
inline constexpr size_t kObsCells = kObsSide * kObsSide;

enum class ObservationFrame { DozerLocal, DumperGlobal };

// The 85x85 height grid each agent plans from. The dozer gets a
// high-resolution window around itself; the dumper gets a low-resolution
// view of the whole site.
struct Observation {
  std::array<float, kObsCells> grid{};
  double resolution = 1.0;  // cm per pixel
  ObservationFrame frame = ObservationFrame::DozerLocal;
  Pose self_pose;
  Pose other_pose;
  Vec2 window_origin;  // world position of pixel (0,0)'s lower-left corner

  float at(size_t col, size_t row) const { return grid[row * kObsSide + col]; }
  float& at(size_t col, size_t row) { return grid[row * kObsSide + col]; }

  Vec2 pixel_center(size_t col, size_t row) const {
    return {window_origin.x + (static_cast<double>(col) + 0.5) * resolution,
            window_origin.y + (static_cast<double>(row) + 0.5) * resolution};
  }

  /// Sum of grid x pixel area [cm^3].
  double volume() const;
};

struct ObservationNoiseParams {
  double salt_pepper_sigma = 2.0;      // spatial swap radius [pixels]
  double gmm_pile_mean = 3.0;          // bump height mean [cm]
  double gmm_pile_sigma = 2.0;         // bump height std [cm]
  size_t gmm_pile_count = 5;           // bumps per observation
  double gmm_pile_spatial_sigma = 2.0; // bump footprint std [pixels]

  bool all_zero() const {
    return salt_pepper_sigma == 0.0 && gmm_pile_mean == 0.0 &&
           gmm_pile_sigma == 0.0 &&
           (gmm_pile_count == 0 || gmm_pile_spatial_sigma == 0.0);
  }
};

/// 85x85 axis-aligned window of side `fov_side` centered on `pose`
/// (default 85 cm at 1 cm/px). Out-of-map pixels are 0.
Observation render_local(const HeightMap& map, const Pose& pose, double fov_side = 85.0);

/// Whole site downsampled to 85x85 by exact area-weighted averaging over a
/// square region of side max(world_width, world_height); preserves volume.
Observation render_global(const HeightMap& map);

/// Salt-and-pepper pixel swaps plus Gaussian pile bumps. Pure given the
/// stream; zero params return the input unchanged.
Observation add_observation_noise(const Observation& obs, const ObservationNoiseParams& params,
                                  RngStream& rng);

}  // namespace sitesim
