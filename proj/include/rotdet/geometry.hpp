#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rotdet/obb.hpp"

namespace rotdet {

// Convex polygon, vertices in CCW order (non-negative shoelace area).
struct ConvexPolygon {
  std::vector<Vec2> vertices;

  double area() const;
  bool empty() const { return vertices.size() < 3; }

  static ConvexPolygon from_box(const OrientedBox& box);
};

// Sutherland-Hodgman intersection of two convex polygons. Returns an empty
// polygon when they do not overlap.
ConvexPolygon clip_convex(const ConvexPolygon& subject, const ConvexPolygon& clip);

// Exact IoU of two rotated rectangles via polygon clipping. Symmetric in its
// arguments bit-for-bit.
double rotated_iou(const OrientedBox& a, const OrientedBox& b);

struct IoUMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major

  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

struct IoUMatrixOptions {
  bool prefilter = true;  // skip clipping when axis-aligned hulls are disjoint
  int threads = 0;        // 0 = hardware concurrency; results identical either way
};

IoUMatrix iou_matrix(const std::vector<OrientedBox>& a,
                     const std::vector<OrientedBox>& b,
                     const IoUMatrixOptions& options = {});

// Greedy NMS over descending scores: an index survives iff its IoU with every
// previously kept index is <= iou_threshold. Score ties break toward the
// lower original index. Returns kept indices in descending-score order.
std::vector<std::size_t> rotated_nms(const std::vector<OrientedBox>& boxes,
                                     const std::vector<double>& scores,
                                     double iou_threshold);

// Monte-Carlo IoU estimate by uniform sampling over the joint axis-aligned
// hull; the verification oracle for rotated_iou. Deterministic given seed.
double monte_carlo_iou(const OrientedBox& a, const OrientedBox& b,
                       std::size_t samples, std::uint64_t seed);

}  // namespace rotdet
