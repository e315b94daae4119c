#pragma once

#include <cmath>
#include <vector>

namespace sitesim {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  bool operator==(const Vec2& o) const = default;
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Normalize an angle to (-pi, pi].
double wrap_angle(double a);

/// Signed smallest rotation from `from` to `to`, in (-pi, pi].
double angle_diff(double from, double to);

/// Unit heading vector.
inline Vec2 heading_vec(double heading) { return {std::cos(heading), std::sin(heading)}; }

// Planar vehicle pose in world centimeters; t is the episode clock in seconds.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double t = 0.0;

  Vec2 position() const { return {x, y}; }
};

bool pose_finite(const Pose& p);

// Simple polygon in world coordinates. Used for the grading boundary
// (the edge where pushed sand leaves the work area).
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {}

  static Polygon rectangle(double min_x, double min_y, double max_x, double max_y);

  bool empty() const { return vertices_.empty(); }
  const std::vector<Vec2>& vertices() const { return vertices_; }

  // Even-odd rule; boundary points count as inside.
  bool contains(const Vec2& p) const;

  Vec2 centroid() const;

 private:
  std::vector<Vec2> vertices_;
};

// Oriented rectangle footprint: center, heading, full length along heading,
// full width across it.
struct OrientedRect {
  Vec2 center;
  double heading = 0.0;
  double length = 0.0;
  double width = 0.0;

  std::vector<Vec2> corners() const;
  bool contains(const Vec2& p) const;
};

/// Separating-axis overlap test for two oriented rectangles (exact).
bool rects_overlap(const OrientedRect& a, const OrientedRect& b);

}  // namespace sitesim
