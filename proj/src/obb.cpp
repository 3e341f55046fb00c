#include "rotdet/obb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rotdet {

double QuadBox::area() const {
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[(i + 1) % 4];
    acc += a.x * b.y - b.x * a.y;
  }
  return 0.5 * acc;
}

Vec2 QuadBox::centroid() const {
  Vec2 c;
  for (const Vec2& v : vertices) {
    c.x += v.x;
    c.y += v.y;
  }
  return {c.x / 4.0, c.y / 4.0};
}

double normalize_angle(double theta, AngleMode mode) {
  if (!std::isfinite(theta)) {
    throw std::domain_error("normalize_angle: non-finite angle");
  }
  const double period = (mode == AngleMode::Detection) ? kPi : 2.0 * kPi;
  const double lo = (mode == AngleMode::Detection) ? -kPi / 4.0 : 0.0;
  const double hi = lo + period;
  if (theta >= lo && theta < hi) {
    return theta;  // keeps normalization exactly idempotent
  }
  double r = std::fmod(theta - lo, period);
  if (r < 0.0) {
    r += period;
  }
  r += lo;
  // fmod is exact but the shifts above round; clamp back into the range.
  if (r >= hi) {
    r -= period;
  }
  if (r < lo) {
    r += period;
  }
  return r;
}

OrientedBox canonicalize(OrientedBox box, AngleMode mode) {
  if (!std::isfinite(box.cx) || !std::isfinite(box.cy) ||
      !std::isfinite(box.w) || !std::isfinite(box.h)) {
    throw std::domain_error("canonicalize: non-finite box fields");
  }
  if (box.w < box.h) {
    std::swap(box.w, box.h);
    box.theta += kPi / 2.0;
  }
  if (box.h < kMinSide) {
    throw std::domain_error("canonicalize: degenerate side length");
  }
  box.theta = normalize_angle(box.theta, mode);
  return box;
}

OrientedBox make_box(double cx, double cy, double w, double h, double theta,
                     AngleMode mode) {
  return canonicalize(OrientedBox{cx, cy, w, h, theta}, mode);
}

QuadBox canonicalize(const QuadBox& quad) {
  if (quad.area() >= 0.0) {
    return quad;
  }
  QuadBox out;
  for (int i = 0; i < 4; ++i) {
    out.vertices[i] = quad.vertices[3 - i];
  }
  return out;
}

QuadBox to_corners(const OrientedBox& box) {
  const Vec2 u{std::cos(box.theta), std::sin(box.theta)};
  const Vec2 v{-u.y, u.x};
  const Vec2 c = box.center();
  const Vec2 du = u * (box.w * 0.5);
  const Vec2 dv = v * (box.h * 0.5);
  QuadBox q;
  q.vertices[0] = c - du - dv;
  q.vertices[1] = c + du - dv;
  q.vertices[2] = c + du + dv;
  q.vertices[3] = c - du + dv;
  return q;
}

namespace {

// Monotone chain, CCW output, strictly convex (collinear points dropped).
std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) {
    return pts;
  }
  std::vector<Vec2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) {
      --k;
    }
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) {
      --k;
    }
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

OrientedBox min_area_rect(const std::vector<Vec2>& points, AngleMode mode) {
  const std::vector<Vec2> hull = convex_hull(points);
  if (hull.size() < 3) {
    throw std::domain_error("min_area_rect: degenerate point set");
  }
  double best_area = std::numeric_limits<double>::infinity();
  OrientedBox best{};
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2 edge = hull[(i + 1) % hull.size()] - hull[i];
    const double len = std::hypot(edge.x, edge.y);
    if (len == 0.0) {
      continue;
    }
    const Vec2 u{edge.x / len, edge.y / len};
    const Vec2 v{-u.y, u.x};
    double smin = std::numeric_limits<double>::infinity(), smax = -smin;
    double tmin = smin, tmax = -smin;
    for (const Vec2& p : hull) {
      const double s = dot(p, u);
      const double t = dot(p, v);
      smin = std::min(smin, s);
      smax = std::max(smax, s);
      tmin = std::min(tmin, t);
      tmax = std::max(tmax, t);
    }
    const double area = (smax - smin) * (tmax - tmin);
    if (area < best_area) {
      best_area = area;
      const double sc = 0.5 * (smin + smax);
      const double tc = 0.5 * (tmin + tmax);
      best.cx = sc * u.x + tc * v.x;
      best.cy = sc * u.y + tc * v.y;
      best.w = smax - smin;
      best.h = tmax - tmin;
      best.theta = std::atan2(u.y, u.x);
    }
  }
  return canonicalize(best, mode);
}

OrientedBox from_quad(const QuadBox& quad, AngleMode mode) {
  return min_area_rect(
      {quad.vertices.begin(), quad.vertices.end()}, mode);
}

bool contains_point(const OrientedBox& box, Vec2 p) {
  const Vec2 u{std::cos(box.theta), std::sin(box.theta)};
  const Vec2 d = p - box.center();
  return std::abs(dot(d, u)) <= box.w * 0.5 &&
         std::abs(cross(u, d)) <= box.h * 0.5;
}

}  // namespace rotdet
