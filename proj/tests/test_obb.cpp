#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "rotdet/obb.hpp"

using namespace rotdet;

TEST_CASE("normalize_angle detection range") {
  CHECK(normalize_angle(0.0) == 0.0);
  CHECK(normalize_angle(kPi) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normalize_angle(-kPi / 2.0) ==
        doctest::Approx(kPi / 2.0).epsilon(1e-12));
  CHECK(normalize_angle(3.0 * kPi / 4.0) ==
        doctest::Approx(-kPi / 4.0).epsilon(1e-12));
  // closed lower bound, open upper bound
  CHECK(normalize_angle(-kPi / 4.0) == -kPi / 4.0);
  for (double t : {-10.0, -1.0, 0.0, 0.3, 2.0, 5.0, 100.0}) {
    const double n = normalize_angle(t);
    CHECK(n >= -kPi / 4.0);
    CHECK(n < 3.0 * kPi / 4.0);
    // pi-periodic residue
    CHECK(std::remainder(n - t, kPi) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("normalize_angle is idempotent") {
  for (double t : {-0.7853981633, 0.0, 0.5, 1.0, 2.3, 2.356194}) {
    const double once = normalize_angle(t);
    CHECK(normalize_angle(once) == once);
  }
  for (double t : {0.0, 0.5, 3.14, 6.28, 6.283185}) {
    const double once = normalize_angle(t, AngleMode::Orientation);
    CHECK(normalize_angle(once, AngleMode::Orientation) == once);
    CHECK(once >= 0.0);
    CHECK(once < 2.0 * kPi);
  }
}

TEST_CASE("normalize_angle rejects non-finite") {
  CHECK_THROWS_AS(normalize_angle(std::nan("")), std::domain_error);
  CHECK_THROWS_AS(normalize_angle(INFINITY, AngleMode::Orientation),
                  std::domain_error);
}

TEST_CASE("canonicalize swaps short-side-first boxes") {
  const OrientedBox b = canonicalize(OrientedBox{0.0, 0.0, 2.0, 6.0, 0.0});
  CHECK(b.w == 6.0);
  CHECK(b.h == 2.0);
  CHECK(b.theta == doctest::Approx(kPi / 2.0).epsilon(1e-12));
  // same rectangle: corners of both parameterizations coincide as sets
  const OrientedBox c = canonicalize(OrientedBox{1.0, 2.0, 4.0, 4.0, 0.3});
  CHECK(c.w == 4.0);
  CHECK(c.h == 4.0);
}

TEST_CASE("canonicalize rejects degenerate and non-finite boxes") {
  CHECK_THROWS_AS(canonicalize(OrientedBox{0, 0, 1.0, 1e-9, 0}),
                  std::domain_error);
  CHECK_THROWS_AS(canonicalize(OrientedBox{0, 0, -1.0, 1.0, 0}),
                  std::domain_error);
  CHECK_THROWS_AS(canonicalize(OrientedBox{std::nan(""), 0, 1, 1, 0}),
                  std::domain_error);
}

TEST_CASE("to_corners of an axis-aligned box") {
  const QuadBox q = to_corners(OrientedBox{2.0, 1.0, 4.0, 2.0, 0.0});
  CHECK(q.vertices[0].x == doctest::Approx(0.0));
  CHECK(q.vertices[0].y == doctest::Approx(0.0));
  CHECK(q.vertices[1].x == doctest::Approx(4.0));
  CHECK(q.vertices[1].y == doctest::Approx(0.0));
  CHECK(q.vertices[2].x == doctest::Approx(4.0));
  CHECK(q.vertices[2].y == doctest::Approx(2.0));
  CHECK(q.vertices[3].x == doctest::Approx(0.0));
  CHECK(q.vertices[3].y == doctest::Approx(2.0));
  CHECK(q.area() == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("to_corners first edge runs along theta with length w") {
  const OrientedBox b{5.0, -3.0, 7.0, 2.0, 0.6};
  const QuadBox q = to_corners(b);
  const Vec2 e = q.vertices[1] - q.vertices[0];
  CHECK(std::hypot(e.x, e.y) == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(std::atan2(e.y, e.x) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(q.area() == doctest::Approx(14.0).epsilon(1e-12));
  const Vec2 c = q.centroid();
  CHECK(c.x == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(c.y == doctest::Approx(-3.0).epsilon(1e-12));
}

TEST_CASE("quad canonicalize makes the winding positive") {
  QuadBox cw;
  cw.vertices = {Vec2{0, 0}, Vec2{0, 2}, Vec2{4, 2}, Vec2{4, 0}};
  CHECK(cw.area() < 0.0);
  const QuadBox ccw = canonicalize(cw);
  CHECK(ccw.area() > 0.0);
  const QuadBox keep = canonicalize(ccw);
  CHECK(keep.area() == ccw.area());
}

TEST_CASE("from_quad on an axis-aligned rectangle") {
  QuadBox q;
  q.vertices = {Vec2{0, 0}, Vec2{4, 0}, Vec2{4, 2}, Vec2{0, 2}};
  const OrientedBox b = from_quad(q);
  CHECK(b.cx == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(b.cy == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.w == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(b.h == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(b.theta == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("from_quad recovers a rotated box from its corners") {
  for (double theta : {-0.6, 0.0, 0.4, 1.2, 2.0}) {
    const OrientedBox src = make_box(12.5, -7.0, 9.0, 3.5, theta);
    const OrientedBox back = from_quad(to_corners(src));
    CHECK(back.cx == doctest::Approx(src.cx).epsilon(1e-9));
    CHECK(back.cy == doctest::Approx(src.cy).epsilon(1e-9));
    CHECK(back.w == doctest::Approx(src.w).epsilon(1e-9));
    CHECK(back.h == doctest::Approx(src.h).epsilon(1e-9));
    CHECK(back.theta == doctest::Approx(src.theta).epsilon(1e-9));
  }
}

TEST_CASE("min_area_rect of a point cloud") {
  // diamond with width 2*sqrt(2) along the 45-degree axis
  const std::vector<Vec2> pts{{0, 0}, {2, 2}, {0, 4}, {-2, 2}, {0, 2}};
  const OrientedBox b = min_area_rect(pts);
  CHECK(b.area() == doctest::Approx(8.0).epsilon(1e-9));
  CHECK(b.cx == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(b.cy == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("min_area_rect rejects degenerate input") {
  CHECK_THROWS_AS(min_area_rect({{0, 0}, {1, 1}}), std::domain_error);
  CHECK_THROWS_AS(min_area_rect({{0, 0}, {1, 1}, {2, 2}, {3, 3}}),
                  std::domain_error);
}

TEST_CASE("contains_point respects rotation") {
  const OrientedBox b{0.0, 0.0, 4.0, 2.0, kPi / 2.0};
  // long side now vertical
  CHECK(contains_point(b, {0.0, 1.9}));
  CHECK(!contains_point(b, {1.9, 0.0}));
  CHECK(contains_point(b, {0.9, 0.0}));
  // boundary is inclusive
  CHECK(contains_point(b, {1.0, 0.0}));
}
