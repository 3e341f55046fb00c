#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rotdet/coding.hpp"
#include "rotdet/obb.hpp"

namespace rotdet {

struct PyramidLevel {
  int stride = 0;
  double base_size = 0.0;
};

struct AnchorGridSpec {
  std::vector<PyramidLevel> levels;
  std::vector<double> angles{0.0};

  // Five-level pyramid, strides 8..128 with square bases 32..512, one angle.
  static AnchorGridSpec retina_default();
};

struct AnchorSet {
  std::vector<OrientedBox> anchors;
  std::vector<int> level_of;  // index into the grid spec's levels, per anchor
};

// Square anchors centered at ((col + 0.5) * stride, (row + 0.5) * stride) on a
// ceil(image / stride) grid per level, ordered level -> row -> col -> angle.
AnchorSet generate_anchors(const AnchorGridSpec& spec, int image_w, int image_h);

inline constexpr int kNegative = -1;
inline constexpr int kIgnore = -2;

struct AssignerConfig {
  double pos_iou = 0.5;
  double neg_iou = 0.4;
  int topk = 9;             // ATSS candidates per pyramid level
  bool force_match = true;  // max-IoU: best anchor of each gt becomes positive
};

// labels[i] is a gt index (>= 0), kNegative, or kIgnore. matched_iou[i] is the
// IoU with the assigned gt for positives and the best-gt IoU otherwise.
struct AssignmentResult {
  std::vector<int> labels;
  std::vector<double> matched_iou;
};

// Threshold assignment: best-gt IoU >= pos_iou is positive, < neg_iou is
// negative, the band between is ignored. With force_match, each gt's highest
// IoU anchor (ties to the lower anchor index, skipped at IoU 0) is made
// positive for it afterwards, later gts overriding earlier ones.
AssignmentResult max_iou_assign(const std::vector<OrientedBox>& anchors,
                                const std::vector<OrientedBox>& gts,
                                const AssignerConfig& config = {});

// Adaptive assignment: per gt, the topk closest anchor centers per level are
// candidates; the IoU threshold is mean + population stddev of the candidate
// IoUs; candidates at or above it whose center lies inside the (rotated) gt
// are positive. Anchors claimed by several gts go to the highest IoU, ties to
// the lower gt index. No ignore label is produced.
AssignmentResult atss_assign(const AnchorSet& anchors,
                             const std::vector<OrientedBox>& gts,
                             const AssignerConfig& config = {});

// Produces regression output for every anchor given a first-stage assignment.
using RefinerFn = std::function<std::vector<BoxOffsets>(
    const std::vector<OrientedBox>& anchors, const AssignmentResult& stage1,
    const std::vector<OrientedBox>& gts)>;

// Stand-in for a trained refinement head: positives get their exact encoded
// target plus Gaussian noise (sigma on all components, scaled by pi/8 for the
// angle), everything else gets zero offsets. Deterministic in the seed.
RefinerFn synthetic_refiner(double noise_sigma = 0.0, std::uint64_t seed = 0,
                            AngleMode mode = AngleMode::Detection);

struct TS4Config {
  AssignerConfig stage1;                        // consumed by ATSS
  AssignerConfig stage2{0.6, 0.5, 9, true};     // consumed by max-IoU
  AngleMode mode = AngleMode::Detection;
};

struct TS4Result {
  AssignmentResult stage1;
  std::vector<OrientedBox> refined;
  AssignmentResult stage2;
};

// Two-stage sample selection: ATSS over the raw anchors, anchor refinement
// through the provided head, then stricter max-IoU over the refined anchors.
TS4Result ts4_assign(const AnchorSet& anchors, const std::vector<OrientedBox>& gts,
                     const RefinerFn& refiner, const TS4Config& config = {});

struct AssignmentStats {
  std::size_t anchors = 0;
  std::size_t gts = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t ignored = 0;
  std::size_t matched_gts = 0;  // gts with at least one positive anchor
  double mean_pos_iou = 0.0;
  double min_pos_iou = 0.0;
  double max_pos_iou = 0.0;
};

AssignmentStats summarize(const AssignmentResult& result, std::size_t num_gts);
std::string to_text(const AssignmentStats& stats);

}  // namespace rotdet
