#include "rotdet/coding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rotdet {

namespace {

void require_valid(const OrientedBox& b, const char* what) {
  if (!std::isfinite(b.cx) || !std::isfinite(b.cy) || !std::isfinite(b.w) ||
      !std::isfinite(b.h) || !std::isfinite(b.theta)) {
    throw std::domain_error(std::string(what) + ": non-finite box");
  }
  if (b.w < kMinSide || b.h < kMinSide) {
    throw std::domain_error(std::string(what) + ": degenerate box side");
  }
}

double angle_residual(double gt_theta, double anchor_theta, AngleMode mode) {
  const double raw = gt_theta - anchor_theta;
  if (mode == AngleMode::Detection) {
    return normalize_angle(raw, AngleMode::Detection);
  }
  double wrapped = normalize_angle(raw, AngleMode::Orientation);
  if (wrapped >= kPi) {
    wrapped -= 2.0 * kPi;
  }
  return wrapped / (2.0 * kPi);
}

}  // namespace

BoxOffsets encode(const OrientedBox& gt, const OrientedBox& anchor, AngleMode mode) {
  require_valid(gt, "encode");
  require_valid(anchor, "encode");
  BoxOffsets t;
  t.tx = (gt.cx - anchor.cx) / anchor.w;
  t.ty = (gt.cy - anchor.cy) / anchor.h;
  t.tw = std::log(gt.w / anchor.w);
  t.th = std::log(gt.h / anchor.h);
  t.ttheta = angle_residual(gt.theta, anchor.theta, mode);
  return t;
}

OrientedBox decode(const OrientedBox& anchor, const BoxOffsets& offsets,
                   AngleMode mode, bool* clamped) {
  require_valid(anchor, "decode");
  if (!std::isfinite(offsets.tx) || !std::isfinite(offsets.ty) ||
      !std::isfinite(offsets.tw) || !std::isfinite(offsets.th) ||
      !std::isfinite(offsets.ttheta)) {
    throw std::invalid_argument("decode: non-finite offsets");
  }
  const double tw = std::clamp(offsets.tw, -kLogSideClamp, kLogSideClamp);
  const double th = std::clamp(offsets.th, -kLogSideClamp, kLogSideClamp);
  if (clamped != nullptr) {
    *clamped = tw != offsets.tw || th != offsets.th;
  }
  OrientedBox out;
  out.cx = anchor.cx + offsets.tx * anchor.w;
  out.cy = anchor.cy + offsets.ty * anchor.h;
  out.w = anchor.w * std::exp(tw);
  out.h = anchor.h * std::exp(th);
  out.theta = anchor.theta + (mode == AngleMode::Detection
                                  ? offsets.ttheta
                                  : offsets.ttheta * 2.0 * kPi);
  return canonicalize(out, mode);
}

std::vector<OrientedBox> refine_anchors(const std::vector<OrientedBox>& anchors,
                                        const std::vector<BoxOffsets>& offsets,
                                        AngleMode mode) {
  if (anchors.size() != offsets.size()) {
    throw std::invalid_argument("refine_anchors: anchors/offsets length mismatch");
  }
  std::vector<OrientedBox> out;
  out.reserve(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    out.push_back(decode(anchors[i], offsets[i], mode));
  }
  return out;
}

}  // namespace rotdet
