#include "rotdet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace rotdet {

double ConvexPolygon::area() const {
  if (vertices.size() < 3) {
    return 0.0;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[(i + 1) % vertices.size()];
    acc += cross(a, b);
  }
  return 0.5 * acc;
}

ConvexPolygon ConvexPolygon::from_box(const OrientedBox& box) {
  const QuadBox q = to_corners(box);
  return ConvexPolygon{{q.vertices.begin(), q.vertices.end()}};
}

namespace {

// One Sutherland-Hodgman pass per clip edge; inside means cross >= 0, so
// boundary points are kept and edge-touching boxes intersect with area 0.
std::vector<Vec2> clip_polygon(std::vector<Vec2> subject,
                               const std::vector<Vec2>& clip) {
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < clip.size() && subject.size() >= 3; ++i) {
    const Vec2 a = clip[i];
    const Vec2 edge = clip[(i + 1) % clip.size()] - a;
    out.clear();
    double ds = cross(edge, subject.back() - a);
    const Vec2* s = &subject.back();
    for (const Vec2& e : subject) {
      const double de = cross(edge, e - a);
      if (de >= 0.0) {
        if (ds < 0.0) {
          out.push_back(*s + (e - *s) * (ds / (ds - de)));
        }
        out.push_back(e);
      } else if (ds >= 0.0) {
        out.push_back(*s + (e - *s) * (ds / (ds - de)));
      }
      ds = de;
      s = &e;
    }
    subject.swap(out);
  }
  if (subject.size() < 3) {
    subject.clear();
  }
  return subject;
}

struct PreparedBox {
  OrientedBox box;
  double cos_t = 1.0;
  double sin_t = 0.0;
  Vec2 lo, hi;  // axis-aligned hull of the corners
};

PreparedBox prepare(const OrientedBox& b) {
  PreparedBox p;
  p.box = b;
  p.cos_t = std::cos(b.theta);
  p.sin_t = std::sin(b.theta);
  const double ex = 0.5 * (std::abs(p.cos_t) * b.w + std::abs(p.sin_t) * b.h);
  const double ey = 0.5 * (std::abs(p.sin_t) * b.w + std::abs(p.cos_t) * b.h);
  p.lo = {b.cx - ex, b.cy - ey};
  p.hi = {b.cx + ex, b.cy + ey};
  return p;
}

void corners_shifted(const PreparedBox& p, double sx, double sy, std::vector<Vec2>& out) {
  const Vec2 c{p.box.cx - sx, p.box.cy - sy};
  const Vec2 du{p.cos_t * (p.box.w * 0.5), p.sin_t * (p.box.w * 0.5)};
  const Vec2 dv{-p.sin_t * (p.box.h * 0.5), p.cos_t * (p.box.h * 0.5)};
  out.assign({c - du - dv, c + du - dv, c + du + dv, c - du + dv});
}

bool box_less(const OrientedBox& a, const OrientedBox& b) {
  return std::tie(a.cx, a.cy, a.w, a.h, a.theta) <
         std::tie(b.cx, b.cy, b.w, b.h, b.theta);
}

bool box_equal(const OrientedBox& a, const OrientedBox& b) {
  return a.cx == b.cx && a.cy == b.cy && a.w == b.w && a.h == b.h &&
         a.theta == b.theta;
}

double prepared_iou(const PreparedBox& a, const PreparedBox& b, bool aabb_reject) {
  if (aabb_reject &&
      (a.hi.x < b.lo.x || b.hi.x < a.lo.x || a.hi.y < b.lo.y || b.hi.y < a.lo.y)) {
    return 0.0;
  }
  if (box_equal(a.box, b.box)) {
    return 1.0;
  }
  // Evaluate in a fixed operand order so iou(a, b) == iou(b, a) bit-for-bit,
  // with both boxes shifted toward the origin for precision.
  const PreparedBox* p = &a;
  const PreparedBox* q = &b;
  if (box_less(q->box, p->box)) {
    std::swap(p, q);
  }
  const double sx = 0.5 * (p->box.cx + q->box.cx);
  const double sy = 0.5 * (p->box.cy + q->box.cy);
  std::vector<Vec2> sub, clip;
  corners_shifted(*p, sx, sy, sub);
  corners_shifted(*q, sx, sy, clip);
  const std::vector<Vec2> inter_poly = clip_polygon(std::move(sub), clip);
  double inter = 0.0;
  for (std::size_t i = 0; i < inter_poly.size(); ++i) {
    inter += cross(inter_poly[i], inter_poly[(i + 1) % inter_poly.size()]);
  }
  inter = std::max(0.5 * inter, 0.0);
  const double uni = p->box.area() + q->box.area() - inter;
  const double iou = inter / uni;
  return std::clamp(iou, 0.0, 1.0);
}

}  // namespace

ConvexPolygon clip_convex(const ConvexPolygon& subject, const ConvexPolygon& clip) {
  if (subject.empty() || clip.empty()) {
    return {};
  }
  return ConvexPolygon{clip_polygon(subject.vertices, clip.vertices)};
}

double rotated_iou(const OrientedBox& a, const OrientedBox& b) {
  return prepared_iou(prepare(a), prepare(b), /*aabb_reject=*/true);
}

IoUMatrix iou_matrix(const std::vector<OrientedBox>& a,
                     const std::vector<OrientedBox>& b,
                     const IoUMatrixOptions& options) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("iou_matrix: empty box list");
  }
  std::vector<PreparedBox> pa(a.size()), pb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) pa[i] = prepare(a[i]);
  for (std::size_t j = 0; j < b.size(); ++j) pb[j] = prepare(b[j]);

  IoUMatrix m;
  m.rows = a.size();
  m.cols = b.size();
  m.values.resize(m.rows * m.cols);

  const auto fill_rows = [&](std::size_t r0, std::size_t r1) {
    for (std::size_t i = r0; i < r1; ++i) {
      double* row = m.values.data() + i * m.cols;
      for (std::size_t j = 0; j < m.cols; ++j) {
        row[j] = prepared_iou(pa[i], pb[j], options.prefilter);
      }
    }
  };

  std::size_t n_threads = options.threads > 0
                              ? static_cast<std::size_t>(options.threads)
                              : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, m.rows);
  if (n_threads <= 1 || m.rows * m.cols < 4096) {
    fill_rows(0, m.rows);
    return m;
  }
  // Disjoint row blocks; per-entry arithmetic does not depend on the split,
  // so the result is identical for any thread count.
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  const std::size_t chunk = (m.rows + n_threads - 1) / n_threads;
  for (std::size_t t = 0; t < n_threads; ++t) {
    const std::size_t r0 = t * chunk;
    const std::size_t r1 = std::min(m.rows, r0 + chunk);
    if (r0 >= r1) break;
    workers.emplace_back(fill_rows, r0, r1);
  }
  for (std::thread& w : workers) w.join();
  return m;
}

std::vector<std::size_t> rotated_nms(const std::vector<OrientedBox>& boxes,
                                     const std::vector<double>& scores,
                                     double iou_threshold) {
  if (boxes.size() != scores.size()) {
    throw std::invalid_argument("rotated_nms: boxes/scores length mismatch");
  }
  if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0)) {
    throw std::invalid_argument("rotated_nms: threshold outside [0, 1]");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) {
      throw std::invalid_argument("rotated_nms: non-finite score");
    }
  }
  std::vector<std::size_t> order(boxes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return scores[i] > scores[j] || (scores[i] == scores[j] && i < j);
  });

  std::vector<PreparedBox> prep(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) prep[i] = prepare(boxes[i]);

  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    bool survives = true;
    for (std::size_t k : kept) {
      if (prepared_iou(prep[idx], prep[k], /*aabb_reject=*/true) > iou_threshold) {
        survives = false;
        break;
      }
    }
    if (survives) {
      kept.push_back(idx);
    }
  }
  return kept;
}

double monte_carlo_iou(const OrientedBox& a, const OrientedBox& b,
                       std::size_t samples, std::uint64_t seed) {
  if (samples < 1) {
    throw std::invalid_argument("monte_carlo_iou: samples must be >= 1");
  }
  const PreparedBox pa = prepare(a);
  const PreparedBox pb = prepare(b);
  const Vec2 lo{std::min(pa.lo.x, pb.lo.x), std::min(pa.lo.y, pb.lo.y)};
  const Vec2 hi{std::max(pa.hi.x, pb.hi.x), std::max(pa.hi.y, pb.hi.y)};
  std::mt19937_64 rng(seed);
  // 53-bit mantissa draw in [0, 1); independent of stdlib distribution details.
  const auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::size_t in_both = 0;
  std::size_t in_union = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Vec2 p{lo.x + unit() * (hi.x - lo.x), lo.y + unit() * (hi.y - lo.y)};
    const bool ia = contains_point(a, p);
    const bool ib = contains_point(b, p);
    in_both += ia && ib;
    in_union += ia || ib;
  }
  return in_union == 0 ? 0.0 : static_cast<double>(in_both) / static_cast<double>(in_union);
}

}  // namespace rotdet
