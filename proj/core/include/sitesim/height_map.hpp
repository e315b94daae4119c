#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sitesim/geometry.hpp"

namespace sitesim {

// Dense row-major grid of terrain heights [cm]. Ground truth of the world and
// the source of every observation. Heights are stored as double internally
// for exact volume bookkeeping; the on-disk format is little-endian float32
// with a JSON sidecar (see serialization.hpp).
class HeightMap {
 public:
  HeightMap() = default;
  HeightMap(size_t width_cells, size_t height_cells, double cell_size,
            Vec2 origin = {0.0, 0.0}, double initial_height = 0.0);

  size_t width_cells() const { return width_; }
  size_t height_cells() const { return height_; }
  double cell_size() const { return cell_size_; }
  Vec2 origin() const { return origin_; }
  bool empty() const { return heights_.empty(); }

  double at(size_t col, size_t row) const { return heights_[row * width_ + col]; }
  double& at(size_t col, size_t row) { return heights_[row * width_ + col]; }

  const std::vector<double>& heights() const { return heights_; }

  // World extent in cm.
  double world_width() const { return static_cast<double>(width_) * cell_size_; }
  double world_height() const { return static_cast<double>(height_) * cell_size_; }

  bool in_bounds(const Vec2& world) const;

  // Cell index containing a world point; caller must check in_bounds first.
  size_t col_of(double world_x) const;
  size_t row_of(double world_y) const;

  Vec2 cell_center(size_t col, size_t row) const;

  // Height at a world point via nearest-cell lookup; 0 outside the map.
  double sample(const Vec2& world) const;

  double cell_area() const { return cell_size_ * cell_size_; }

  /// Sum of heights x cell area [cm^3].
  double total_volume() const;

  /// Volume above `target` [cm^3], optionally restricted to a boundary polygon.
  double volume_above(double target) const;
  double volume_above(double target, const Polygon& within) const;

  /// Cell with the maximum height; returns false if the map is empty.
  bool max_cell(size_t& col, size_t& row, double& height) const;

 private:
  size_t width_ = 0;
  size_t height_ = 0;
  double cell_size_ = 1.0;
  Vec2 origin_;
  std::vector<double> heights_;
};

/// Deposit a truncated, renormalized Gaussian pile of exactly `volume` cm^3
/// centered at `center` (support radius 2.5 sigma, clipped to the map).
/// Shared by the dumper's sand-spreading model and scenario generation.
void add_sand_pile(HeightMap& map, const Vec2& center, double sigma, double volume);

}  // namespace sitesim
