#include "sitesim/height_map.hpp"

#include <algorithm>
#include <cmath>

#include "sitesim/errors.hpp"

namespace sitesim {

HeightMap::HeightMap(size_t width_cells, size_t height_cells, double cell_size,
                     Vec2 origin, double initial_height)
    : width_(width_cells),
      height_(height_cells),
      cell_size_(cell_size),
      origin_(origin),
      heights_(width_cells * height_cells, initial_height) {
  if (cell_size <= 0.0) throw ConfigError("HeightMap cell_size must be > 0");
  if (initial_height < 0.0) throw ConfigError("HeightMap heights must be >= 0");
}

bool HeightMap::in_bounds(const Vec2& world) const {
  const double lx = world.x - origin_.x;
  const double ly = world.y - origin_.y;
  return lx >= 0.0 && ly >= 0.0 && lx < world_width() && ly < world_height();
}

size_t HeightMap::col_of(double world_x) const {
  const auto c = static_cast<long>((world_x - origin_.x) / cell_size_);
  return static_cast<size_t>(std::clamp<long>(c, 0, static_cast<long>(width_) - 1));
}

size_t HeightMap::row_of(double world_y) const {
  const auto r = static_cast<long>((world_y - origin_.y) / cell_size_);
  return static_cast<size_t>(std::clamp<long>(r, 0, static_cast<long>(height_) - 1));
}

Vec2 HeightMap::cell_center(size_t col, size_t row) const {
  return {origin_.x + (static_cast<double>(col) + 0.5) * cell_size_,
          origin_.y + (static_cast<double>(row) + 0.5) * cell_size_};
}

double HeightMap::sample(const Vec2& world) const {
  if (!in_bounds(world)) return 0.0;
  return at(col_of(world.x), row_of(world.y));
}

double HeightMap::total_volume() const {
  double sum = 0.0;
  for (double h : heights_) sum += h;
  return sum * cell_area();
}

double HeightMap::volume_above(double target) const {
  double sum = 0.0;
  for (double h : heights_) sum += std::max(0.0, h - target);
  return sum * cell_area();
}

double HeightMap::volume_above(double target, const Polygon& within) const {
  if (within.empty()) return volume_above(target);
  double sum = 0.0;
  for (size_t r = 0; r < height_; ++r) {
    for (size_t c = 0; c < width_; ++c) {
      const double h = at(c, r);
      if (h > target && within.contains(cell_center(c, r))) sum += h - target;
    }
  }
  return sum * cell_area();
}

bool HeightMap::max_cell(size_t& col, size_t& row, double& height) const {
  if (heights_.empty()) return false;
  const auto it = std::max_element(heights_.begin(), heights_.end());
  const size_t idx = static_cast<size_t>(it - heights_.begin());
  col = idx % width_;
  row = idx / width_;
  height = *it;
  return true;
}

void add_sand_pile(HeightMap& map, const Vec2& center, double sigma, double volume) {
  if (sigma <= 0.0) throw ConfigError("sand pile sigma must be > 0");
  if (volume <= 0.0) throw ConfigError("sand pile volume must be > 0");

  // Finite support keeps fringe heights negligible so the dozer can actually
  // finish a site; renormalization keeps the deposited volume exact even when
  // the support is clipped at the site edges.
  const double support = std::max(2.5 * sigma, map.cell_size());
  const long c0 = static_cast<long>(std::floor((center.x - support - map.origin().x) / map.cell_size()));
  const long c1 = static_cast<long>(std::ceil((center.x + support - map.origin().x) / map.cell_size()));
  const long r0 = static_cast<long>(std::floor((center.y - support - map.origin().y) / map.cell_size()));
  const long r1 = static_cast<long>(std::ceil((center.y + support - map.origin().y) / map.cell_size()));

  const long max_col = static_cast<long>(map.width_cells()) - 1;
  const long max_row = static_cast<long>(map.height_cells()) - 1;

  struct Target {
    size_t col, row;
    double w;
  };
  std::vector<Target> targets;
  double weight_sum = 0.0;
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
  for (long r = std::max(0L, r0); r <= std::min(max_row, r1); ++r) {
    for (long c = std::max(0L, c0); c <= std::min(max_col, c1); ++c) {
      const Vec2 p = map.cell_center(static_cast<size_t>(c), static_cast<size_t>(r));
      const double d2 = (p - center).dot(p - center);
      if (d2 > support * support) continue;
      const double w = std::exp(-d2 * inv_two_sigma2);
      targets.push_back({static_cast<size_t>(c), static_cast<size_t>(r), w});
      weight_sum += w;
    }
  }
  if (targets.empty() || weight_sum <= 0.0) {
    // Degenerate center outside the map with no overlapping support: drop the
    // whole volume onto the nearest cell so nothing silently vanishes.
    const size_t c = map.col_of(center.x);
    const size_t r = map.row_of(center.y);
    map.at(c, r) += volume / map.cell_area();
    return;
  }
  const double height_per_weight = volume / (weight_sum * map.cell_area());
  for (const Target& t : targets) map.at(t.col, t.row) += t.w * height_per_weight;
}

}  // namespace sitesim
