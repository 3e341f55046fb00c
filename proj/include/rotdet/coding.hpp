#pragma once

#include <vector>

#include "rotdet/obb.hpp"

namespace rotdet {

// Regression targets relative to an anchor: normalized center shift, log side
// ratios, and an angle residual. In Detection mode the residual is the raw
// difference wrapped to [-pi/4, 3pi/4); in Orientation mode it is wrapped to
// [-pi, pi) and scaled by 1/(2*pi) so all five components share magnitude.
struct BoxOffsets {
  double tx = 0.0;
  double ty = 0.0;
  double tw = 0.0;
  double th = 0.0;
  double ttheta = 0.0;
};

// Log side ratios beyond this are clamped in decode so exp() cannot blow up.
inline constexpr double kLogSideClamp = 4.0;

BoxOffsets encode(const OrientedBox& gt, const OrientedBox& anchor,
                  AngleMode mode = AngleMode::Detection);

// Inverse of encode. The result is canonical (w >= h, angle in range). If
// `clamped` is non-null it reports whether tw or th hit the clamp.
OrientedBox decode(const OrientedBox& anchor, const BoxOffsets& offsets,
                   AngleMode mode = AngleMode::Detection,
                   bool* clamped = nullptr);

// Element-wise decode; used to turn first-stage regression output into the
// refined anchors consumed by a second assignment pass.
std::vector<OrientedBox> refine_anchors(const std::vector<OrientedBox>& anchors,
                                        const std::vector<BoxOffsets>& offsets,
                                        AngleMode mode = AngleMode::Detection);

}  // namespace rotdet
