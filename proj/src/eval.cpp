#include "rotdet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rotdet/geometry.hpp"

namespace rotdet {

namespace {

struct ClassData {
  std::vector<std::size_t> det_idx;  // descending score, ties by input order
  std::map<std::string, std::vector<std::size_t>> gts_by_image;
  std::size_t num_gt = 0;  // non-difficult only
};

// TP/FP flags for one class at one threshold, in det_idx order.
std::vector<char> match_class(const ClassData& cd,
                              const std::vector<Detection>& dets,
                              const std::vector<GtInstance>& gts,
                              double threshold) {
  std::map<std::string, std::vector<char>> used;
  for (const auto& [image, idx] : cd.gts_by_image) {
    used.emplace(image, std::vector<char>(idx.size(), 0));
  }
  std::vector<char> tp(cd.det_idx.size(), 0);
  for (std::size_t k = 0; k < cd.det_idx.size(); ++k) {
    const Detection& det = dets[cd.det_idx[k]];
    const auto it = cd.gts_by_image.find(det.image_id);
    if (it == cd.gts_by_image.end()) {
      continue;  // FP: no gt in this image
    }
    std::vector<char>& taken = used[det.image_id];
    double best = -1.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < it->second.size(); ++j) {
      const GtInstance& gt = gts[it->second[j]];
      if (gt.difficult || taken[j]) {
        continue;
      }
      const double iou = rotated_iou(det.box, gt.box);
      if (iou > best) {
        best = iou;
        best_j = j;
      }
    }
    if (best >= threshold) {
      tp[k] = 1;
      taken[best_j] = 1;
    }
  }
  return tp;
}

void pr_curve(const std::vector<char>& tp, std::size_t num_gt,
              std::vector<double>& precision, std::vector<double>& recall) {
  precision.clear();
  recall.clear();
  std::size_t tps = 0;
  std::size_t fps = 0;
  for (char flag : tp) {
    tps += flag != 0;
    fps += flag == 0;
    precision.push_back(static_cast<double>(tps) / static_cast<double>(tps + fps));
    recall.push_back(num_gt == 0 ? 0.0
                                 : static_cast<double>(tps) /
                                       static_cast<double>(num_gt));
  }
}

double ap_11point(const std::vector<double>& precision,
                  const std::vector<double>& recall) {
  double ap = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double r = k / 10.0;
    double best = 0.0;
    for (std::size_t i = 0; i < recall.size(); ++i) {
      if (recall[i] >= r) {
        best = std::max(best, precision[i]);
      }
    }
    ap += best;
  }
  return ap / 11.0;
}

double ap_area(const std::vector<double>& precision,
               const std::vector<double>& recall) {
  // Right-max precision envelope over [0, 1] with sentinels at both ends.
  std::vector<double> mrec{0.0};
  mrec.insert(mrec.end(), recall.begin(), recall.end());
  mrec.push_back(1.0);
  std::vector<double> mpre{0.0};
  mpre.insert(mpre.end(), precision.begin(), precision.end());
  mpre.push_back(0.0);
  for (std::size_t i = mpre.size() - 1; i > 0; --i) {
    mpre[i - 1] = std::max(mpre[i - 1], mpre[i]);
  }
  double ap = 0.0;
  for (std::size_t i = 0; i + 1 < mrec.size(); ++i) {
    ap += (mrec[i + 1] - mrec[i]) * mpre[i + 1];
  }
  return ap;
}

}  // namespace

EvalReport evaluate_detections(const std::vector<Detection>& dets,
                               const std::vector<GtInstance>& gts,
                               MetricStyle style,
                               std::vector<double> iou_thresholds) {
  if (iou_thresholds.empty()) {
    if (style == MetricStyle::COCO) {
      for (int k = 0; k < 10; ++k) {
        iou_thresholds.push_back(0.5 + 0.05 * k);
      }
    } else {
      iou_thresholds.push_back(0.5);
    }
  }
  for (double t : iou_thresholds) {
    if (!(t > 0.0 && t < 1.0)) {
      throw std::invalid_argument("evaluate_detections: threshold outside (0, 1)");
    }
  }
  if (style != MetricStyle::COCO && iou_thresholds.size() != 1) {
    throw std::invalid_argument(
        "evaluate_detections: VOC styles take exactly one threshold");
  }
  for (const Detection& d : dets) {
    if (!std::isfinite(d.score)) {
      throw std::invalid_argument("evaluate_detections: non-finite score");
    }
  }

  std::map<int, ClassData> by_class;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    ClassData& cd = by_class[gts[i].cls];
    cd.gts_by_image[gts[i].image_id].push_back(i);
    cd.num_gt += !gts[i].difficult;
  }
  for (std::size_t i = 0; i < dets.size(); ++i) {
    by_class[dets[i].cls].det_idx.push_back(i);
  }

  EvalReport report;
  report.style = style;
  report.thresholds = iou_thresholds;
  double ap_sum = 0.0;
  std::size_t ap_classes = 0;

  for (auto& [cls, cd] : by_class) {
    std::stable_sort(cd.det_idx.begin(), cd.det_idx.end(),
                     [&](std::size_t a, std::size_t b) {
                       return dets[a].score > dets[b].score;
                     });
    ClassEval ce;
    ce.cls = cls;
    ce.num_gt = cd.num_gt;
    ce.num_det = cd.det_idx.size();

    double mean_ap = 0.0;
    for (std::size_t ti = 0; ti < iou_thresholds.size(); ++ti) {
      const std::vector<char> tp = match_class(cd, dets, gts, iou_thresholds[ti]);
      std::vector<double> precision, recall;
      pr_curve(tp, cd.num_gt, precision, recall);
      const double ap = cd.num_gt == 0
                            ? 0.0
                            : (style == MetricStyle::VOC07
                                   ? ap_11point(precision, recall)
                                   : ap_area(precision, recall));
      mean_ap += ap;
      if (ti == 0) {
        ce.precision = std::move(precision);
        ce.recall = std::move(recall);
      }
      if (style == MetricStyle::COCO && cd.num_gt > 0) {
        if (std::abs(iou_thresholds[ti] - 0.5) < 1e-9) {
          report.ap50 += ap;  // summed here, averaged below
        }
        if (std::abs(iou_thresholds[ti] - 0.75) < 1e-9) {
          report.ap75 += ap;
        }
      }
    }
    ce.ap = mean_ap / static_cast<double>(iou_thresholds.size());
    if (ce.num_gt > 0) {
      ap_sum += ce.ap;
      ++ap_classes;
    }
    report.classes.push_back(std::move(ce));
  }
  if (ap_classes > 0) {
    report.map = ap_sum / static_cast<double>(ap_classes);
    report.ap50 /= static_cast<double>(ap_classes);
    report.ap75 /= static_cast<double>(ap_classes);
  }
  return report;
}

const char* style_name(MetricStyle style) {
  switch (style) {
    case MetricStyle::VOC07:
      return "voc07";
    case MetricStyle::VOC12:
      return "voc12";
    case MetricStyle::COCO:
      return "coco";
  }
  return "unknown";
}

std::string to_text(const EvalReport& report) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6);
  os << "style " << style_name(report.style) << '\n';
  os << "thresholds";
  for (double t : report.thresholds) {
    os << ' ' << t;
  }
  os << '\n';
  os << "classes " << report.classes.size() << '\n';
  for (const ClassEval& ce : report.classes) {
    os << "class " << ce.cls << " gt " << ce.num_gt << " dets " << ce.num_det
       << " ap " << ce.ap << '\n';
  }
  if (report.style == MetricStyle::COCO) {
    os << "ap50 " << report.ap50 << '\n';
    os << "ap75 " << report.ap75 << '\n';
  }
  os << "map " << report.map << '\n';
  return os.str();
}

std::string pr_csv(const EvalReport& report) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6);
  os << "class,rank,precision,recall\n";
  for (const ClassEval& ce : report.classes) {
    for (std::size_t i = 0; i < ce.precision.size(); ++i) {
      os << ce.cls << ',' << i + 1 << ',' << ce.precision[i] << ','
         << ce.recall[i] << '\n';
    }
  }
  return os.str();
}

}  // namespace rotdet
