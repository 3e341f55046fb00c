#pragma once

#include <string>
#include <vector>

#include "rotdet/obb.hpp"

namespace rotdet {

enum class MetricStyle { VOC07, VOC12, COCO };

struct Detection {
  std::string image_id;
  OrientedBox box;
  double score = 0.0;
  int cls = 0;
};

struct GtInstance {
  std::string image_id;
  OrientedBox box;
  int cls = 0;
  bool difficult = false;
};

struct ClassEval {
  int cls = 0;
  std::size_t num_gt = 0;   // non-difficult ground truths
  std::size_t num_det = 0;
  // PR trace at the primary (first) threshold, one point per detection in
  // descending score order.
  std::vector<double> precision;
  std::vector<double> recall;
  double ap = 0.0;  // COCO: mean over thresholds, otherwise single-threshold
};

struct EvalReport {
  MetricStyle style = MetricStyle::VOC07;
  std::vector<double> thresholds;
  std::vector<ClassEval> classes;  // ascending class id
  double map = 0.0;   // mean AP over classes with num_gt > 0
  double ap50 = 0.0;  // filled when 0.5 / 0.75 are among the thresholds
  double ap75 = 0.0;
};

// Greedy per-image, per-class matching in descending score order; each
// detection takes the unmatched non-difficult gt of highest IoU and is a TP
// if that IoU reaches the threshold, otherwise an FP. Difficult gts are
// excluded from matching and from the positive count. VOC07 uses the 11-point
// recall grid, VOC12 the interpolated area under the full curve, COCO the
// mean of interpolated-area APs over all thresholds.
//
// Empty `iou_thresholds` selects the style default: {0.5} for VOC styles,
// 0.50:0.05:0.95 for COCO. VOC styles accept exactly one threshold.
EvalReport evaluate_detections(const std::vector<Detection>& dets,
                               const std::vector<GtInstance>& gts,
                               MetricStyle style,
                               std::vector<double> iou_thresholds = {});

const char* style_name(MetricStyle style);

// Line-oriented report: style, thresholds, one line per class, then
// ap50/ap75 (COCO) and map.
std::string to_text(const EvalReport& report);

// CSV of the stored PR traces: class,rank,precision,recall.
std::string pr_csv(const EvalReport& report);

}  // namespace rotdet
