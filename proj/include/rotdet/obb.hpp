#pragma once

#include <array>
#include <vector>

// Image coordinate conventions used throughout:
//   x grows to the right, y grows down (raster order).
//   Angles are radians measured from the +x axis toward +y, so increasing
//   theta turns clockwise on screen. Mirrored-y conventions negate theta.

namespace rotdet {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Shorter sides are rejected as degenerate (IoU would divide by ~0).
inline constexpr double kMinSide = 1e-6;

enum class AngleMode {
  Detection,    // theta in [-pi/4, 3*pi/4); box is symmetric under a half turn
  Orientation,  // theta in [0, 2*pi); angle carries a full heading
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

// Rotated rectangle: center, long side w, short side h, angle of the w
// direction. Canonical boxes satisfy w >= h > 0 and theta in the mode range.
struct OrientedBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double theta = 0.0;

  double area() const { return w * h; }
  Vec2 center() const { return {cx, cy}; }
};

// Four ordered vertices. Canonical winding is counterclockwise in image
// coordinates, i.e. positive shoelace area.
struct QuadBox {
  std::array<Vec2, 4> vertices{};

  double area() const;  // signed shoelace area
  Vec2 centroid() const;
};

// Wraps theta into the half-open range of the mode; identity on in-range
// values. Throws std::domain_error on non-finite input.
double normalize_angle(double theta, AngleMode mode = AngleMode::Detection);

// Long-side repair (swap sides, theta += pi/2 when w < h) followed by angle
// normalization. Throws std::domain_error for non-finite fields or sides
// below kMinSide.
OrientedBox canonicalize(OrientedBox box, AngleMode mode = AngleMode::Detection);

OrientedBox make_box(double cx, double cy, double w, double h, double theta,
                     AngleMode mode = AngleMode::Detection);

// Reverses the vertex order if the winding is negative.
QuadBox canonicalize(const QuadBox& quad);

// Corners in CCW order; the first edge runs along theta with length w and
// the vertex centroid is the box center.
QuadBox to_corners(const OrientedBox& box);

// Minimum-area enclosing rotated rectangle (rotating calipers over the
// convex hull). Throws std::domain_error when the hull is degenerate.
OrientedBox min_area_rect(const std::vector<Vec2>& points,
                          AngleMode mode = AngleMode::Detection);

// Canonical box for an exact rectangle, minimum-area enclosing rectangle
// otherwise. Vertex order of the input does not matter.
OrientedBox from_quad(const QuadBox& quad, AngleMode mode = AngleMode::Detection);

// True iff p lies inside or on the boundary of the rectangle.
bool contains_point(const OrientedBox& box, Vec2 p);

}  // namespace rotdet
