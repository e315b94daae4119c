#include <doctest.h>

#include <cmath>

#include "sitesim/geometry.hpp"

using namespace sitesim;

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(2.0 * kPi + 0.25) == doctest::Approx(0.25));
  CHECK(wrap_angle(-2.0 * kPi - 0.25) == doctest::Approx(-0.25));
}

TEST_CASE("angle_diff is the signed smallest rotation") {
  CHECK(angle_diff(0.1, 0.3) == doctest::Approx(0.2));
  CHECK(angle_diff(0.3, 0.1) == doctest::Approx(-0.2));
  CHECK(angle_diff(-3.0, 3.0) == doctest::Approx(-(2.0 * kPi - 6.0)));
}

TEST_CASE("polygon containment, boundary counts as inside") {
  const Polygon rect = Polygon::rectangle(0.0, 0.0, 10.0, 5.0);
  CHECK(rect.contains({5.0, 2.5}));
  CHECK(rect.contains({0.0, 0.0}));
  CHECK(rect.contains({10.0, 5.0}));
  CHECK(rect.contains({5.0, 0.0}));
  CHECK_FALSE(rect.contains({10.1, 2.0}));
  CHECK_FALSE(rect.contains({-0.1, 2.0}));
  CHECK_FALSE(rect.contains({5.0, 5.2}));
}

TEST_CASE("oriented rectangle corners and containment") {
  const OrientedRect r{{0.0, 0.0}, 0.0, 4.0, 2.0};
  CHECK(r.contains({1.9, 0.9}));
  CHECK_FALSE(r.contains({2.1, 0.0}));
  CHECK_FALSE(r.contains({0.0, 1.1}));

  const OrientedRect rot{{0.0, 0.0}, kPi / 2.0, 4.0, 2.0};
  CHECK(rot.contains({0.0, 1.9}));
  CHECK_FALSE(rot.contains({1.1, 0.0}));
}

TEST_CASE("separating-axis overlap") {
  const OrientedRect a{{0.0, 0.0}, 0.0, 60.0, 40.0};

  SUBCASE("identical rectangles overlap") {
    CHECK(rects_overlap(a, a));
  }
  SUBCASE("far apart never overlap") {
    const OrientedRect b{{200.0, 0.0}, 0.7, 60.0, 40.0};
    CHECK_FALSE(rects_overlap(a, b));
  }
  SUBCASE("axis-aligned near case, 60 > 50") {
    const OrientedRect b{{50.0, 0.0}, 0.0, 60.0, 40.0};
    CHECK(rects_overlap(a, b));
  }
  SUBCASE("axis-aligned separated, 60 < 70") {
    const OrientedRect b{{70.0, 0.0}, 0.0, 60.0, 40.0};
    CHECK_FALSE(rects_overlap(a, b));
  }
  SUBCASE("rotation only detectable on the second rect's axes") {
    // Diamond poking toward a square: corners matter.
    const OrientedRect b{{45.0, 0.0}, kPi / 4.0, 40.0, 40.0};
    CHECK(rects_overlap(a, b));
    const OrientedRect c{{65.0, 0.0}, kPi / 4.0, 40.0, 40.0};
    CHECK_FALSE(rects_overlap(a, c));
  }
  SUBCASE("symmetry") {
    const OrientedRect b{{42.0, 12.0}, 1.1, 60.0, 40.0};
    CHECK(rects_overlap(a, b) == rects_overlap(b, a));
  }
}
