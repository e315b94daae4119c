#include "sitesim/geometry.hpp"

#include <array>

namespace sitesim {

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a > kPi) a -= 2.0 * kPi;
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

double angle_diff(double from, double to) { return wrap_angle(to - from); }

bool pose_finite(const Pose& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.heading) &&
         std::isfinite(p.t);
}

Polygon Polygon::rectangle(double min_x, double min_y, double max_x, double max_y) {
  return Polygon({{min_x, min_y}, {max_x, min_y}, {max_x, max_y}, {min_x, max_y}});
}

bool Polygon::contains(const Vec2& p) const {
  const auto& v = vertices_;
  const size_t n = v.size();
  if (n < 3) return false;
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    // On-edge check first so boundary points are inside regardless of parity.
    const Vec2 a = v[j];
    const Vec2 b = v[i];
    const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (std::abs(cross) < 1e-9 && (p - a).dot(p - b) <= 1e-9) return true;
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double x_int =
          v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x_int) inside = !inside;
    }
  }
  return inside;
}

Vec2 Polygon::centroid() const {
  Vec2 c;
  if (vertices_.empty()) return c;
  for (const Vec2& v : vertices_) c = c + v;
  return c * (1.0 / static_cast<double>(vertices_.size()));
}

std::vector<Vec2> OrientedRect::corners() const {
  const Vec2 f = heading_vec(heading) * (length * 0.5);
  const Vec2 s = Vec2{-std::sin(heading), std::cos(heading)} * (width * 0.5);
  return {center + f + s, center + f - s, center - f - s, center - f + s};
}

bool OrientedRect::contains(const Vec2& p) const {
  const Vec2 d = p - center;
  const Vec2 fwd = heading_vec(heading);
  const Vec2 side{-fwd.y, fwd.x};
  return std::abs(d.dot(fwd)) <= length * 0.5 && std::abs(d.dot(side)) <= width * 0.5;
}

namespace {

// Projects both rectangles onto `axis` and reports separation.
bool separated_on_axis(const Vec2& axis, const std::vector<Vec2>& ca,
                       const std::vector<Vec2>& cb) {
  double min_a = 1e300, max_a = -1e300, min_b = 1e300, max_b = -1e300;
  for (const Vec2& p : ca) {
    const double v = p.dot(axis);
    min_a = std::min(min_a, v);
    max_a = std::max(max_a, v);
  }
  for (const Vec2& p : cb) {
    const double v = p.dot(axis);
    min_b = std::min(min_b, v);
    max_b = std::max(max_b, v);
  }
  return max_a < min_b || max_b < min_a;
}

}  // namespace

bool rects_overlap(const OrientedRect& a, const OrientedRect& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  const std::array<Vec2, 4> axes = {
      heading_vec(a.heading),
      Vec2{-std::sin(a.heading), std::cos(a.heading)},
      heading_vec(b.heading),
      Vec2{-std::sin(b.heading), std::cos(b.heading)},
  };
  for (const Vec2& axis : axes) {
    if (separated_on_axis(axis, ca, cb)) return false;
  }
  return true;
}

}  // namespace sitesim
