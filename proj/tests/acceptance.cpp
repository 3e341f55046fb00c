// End-to-end gate: one line per criterion, nonzero exit if any fails.
// Thresholds and runtimes mirror the project requirements; every expected
// value was derived independently of the implementation.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "rotdet/annotations.hpp"
#include "rotdet/assign.hpp"
#include "rotdet/coding.hpp"
#include "rotdet/eval.hpp"
#include "rotdet/geometry.hpp"
#include "rotdet/loss.hpp"
#include "rotdet/obb.hpp"

using namespace rotdet;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

int failures = 0;

void report(int number, bool ok, const std::string& what, double secs) {
  std::printf("criterion %02d %s  %s (%.2f s)\n", number, ok ? "PASS" : "FAIL",
              what.c_str(), secs);
  if (!ok) {
    ++failures;
  }
}

double axis_aligned_iou(const OrientedBox& a, const OrientedBox& b) {
  const double ix = std::max(
      0.0, std::min(a.cx + a.w / 2, b.cx + b.w / 2) -
               std::max(a.cx - a.w / 2, b.cx - b.w / 2));
  const double iy = std::max(
      0.0, std::min(a.cy + a.h / 2, b.cy + b.h / 2) -
               std::max(a.cy - a.h / 2, b.cy - b.h / 2));
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

void criterion_1() {
  const auto t0 = clock_type::now();
  testutil::Rng rng(1001);
  bool ok = true;
  for (int i = 0; i < 1000 && ok; ++i) {
    const OrientedBox a = make_box(rng.range(0, 60), rng.range(0, 60),
                                   rng.range(10, 40), rng.range(5, 10), 0.0);
    const OrientedBox b = make_box(rng.range(0, 60), rng.range(0, 60),
                                   rng.range(10, 40), rng.range(5, 10), 0.0);
    ok = std::abs(rotated_iou(a, b) - axis_aligned_iou(a, b)) <= 1e-12;
  }
  const OrientedBox ha = make_box(0, 0, 2, 1, 0.0);
  const OrientedBox va = make_box(0, 0, 2, 1, kPi / 2.0);
  ok = ok && std::abs(rotated_iou(ha, va) - 1.0 / 3.0) <= 1e-12;
  const double secs = seconds_since(t0);
  report(1, ok && secs < 1.0, "rotated iou matches the axis-aligned closed form",
         secs);
}

void criterion_2() {
  const auto t0 = clock_type::now();
  testutil::Rng rng(2002);
  int within = 0;
  for (int i = 0; i < 1000; ++i) {
    const OrientedBox a = rng.box(25.0);
    const OrientedBox b = rng.box(25.0);
    const double exact = rotated_iou(a, b);
    const double mc = monte_carlo_iou(a, b, 200000, 777000 + i);
    within += std::abs(exact - mc) <= 0.01;
  }
  const double secs = seconds_since(t0);
  report(2, within >= 990 && secs < 60.0,
         "monte-carlo estimate brackets the exact iou on " +
             std::to_string(within) + "/1000 pairs",
         secs);
}

std::vector<std::size_t> nms_reference(const std::vector<OrientedBox>& boxes,
                                       const std::vector<double>& scores,
                                       double threshold) {
  std::vector<std::size_t> order(boxes.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&scores](std::size_t x, std::size_t y) {
    if (scores[x] != scores[y]) {
      return scores[x] > scores[y];
    }
    return x < y;
  });
  std::vector<std::size_t> kept;
  for (std::size_t cand : order) {
    bool keep = true;
    for (std::size_t k : kept) {
      if (rotated_iou(boxes[cand], boxes[k]) > threshold) {
        keep = false;
        break;
      }
    }
    if (keep) {
      kept.push_back(cand);
    }
  }
  return kept;
}

void criterion_3() {
  const auto t0 = clock_type::now();
  bool ok = true;
  for (int scene = 0; scene < 500 && ok; ++scene) {
    testutil::Rng rng(3003 + scene);
    const int n = 20 + static_cast<int>(rng.range(0, 181));
    std::vector<OrientedBox> boxes;
    std::vector<double> scores;
    for (int i = 0; i < n; ++i) {
      boxes.push_back(rng.box(250.0));
      scores.push_back(rng.unit());
    }
    const double thr = rng.range(0.1, 0.9);
    ok = rotated_nms(boxes, scores, thr) == nms_reference(boxes, scores, thr);
  }
  const double secs = seconds_since(t0);
  report(3, ok && secs < 30.0,
         "greedy nms equals the quadratic reference on 500 scenes", secs);
}

void criterion_4() {
  const auto t0 = clock_type::now();
  bool ok = true;
  for (AngleMode mode : {AngleMode::Detection, AngleMode::Orientation}) {
    testutil::Rng rng(mode == AngleMode::Detection ? 4004 : 4005);
    for (int i = 0; i < 10000 && ok; ++i) {
      OrientedBox anchor = rng.box(80.0);
      OrientedBox gt = rng.box(80.0);
      anchor = canonicalize(anchor, mode);
      gt = canonicalize(gt, mode);
      const BoxOffsets off = encode(gt, anchor, mode);
      if (mode == AngleMode::Detection) {
        ok = off.ttheta >= -kPi / 4.0 && off.ttheta < 3.0 * kPi / 4.0;
      }
      bool clamped = false;
      const OrientedBox dec = decode(anchor, off, mode, &clamped);
      const double period = mode == AngleMode::Detection ? kPi : 2.0 * kPi;
      ok = ok && !clamped &&
           std::abs(dec.cx - gt.cx) <= 1e-9 * std::max(1.0, std::abs(gt.cx)) &&
           std::abs(dec.cy - gt.cy) <= 1e-9 * std::max(1.0, std::abs(gt.cy)) &&
           std::abs(dec.w - gt.w) <= 1e-9 * std::max(1.0, gt.w) &&
           std::abs(dec.h - gt.h) <= 1e-9 * std::max(1.0, gt.h) &&
           std::abs(std::remainder(dec.theta - gt.theta, period)) <= 1e-9;
    }
  }
  const double secs = seconds_since(t0);
  report(4, ok && secs < 5.0,
         "offset coding round-trips 10k boxes in both angle modes", secs);
}

void criterion_5() {
  const auto t0 = clock_type::now();
  const AnchorGridSpec spec = AnchorGridSpec::retina_default();
  const std::size_t one = generate_anchors(spec, 1024, 1024).anchors.size();
  AnchorGridSpec three = spec;
  three.angles = {0.0, kPi / 6.0, kPi / 3.0};
  const std::size_t tri = generate_anchors(three, 1024, 1024).anchors.size();
  report(5, one == 21824 && tri == 3 * 21824,
         "default grid yields 21824 anchors, 3 angles give exactly 3x",
         seconds_since(t0));
}

void criterion_6() {
  const auto t0 = clock_type::now();
  const std::vector<OrientedBox> gts{{0, 0, 10, 10, 0}};
  const std::vector<OrientedBox> anchors{
      {0, 0, 10, 5.5, 0}, {0, 0, 10, 4.5, 0}, {0, 0, 10, 3.5, 0}};
  AssignerConfig stage1{0.5, 0.4, 9, false};
  AssignerConfig stage2{0.6, 0.5, 9, false};
  const std::vector<int> first = max_iou_assign(anchors, gts, stage1).labels;
  const std::vector<int> second = max_iou_assign(anchors, gts, stage2).labels;
  const bool ok = first == std::vector<int>{0, kIgnore, kNegative} &&
                  second == std::vector<int>{kIgnore, kNegative, kNegative};
  report(6, ok, "iou 0.55/0.45/0.35 split exactly at both threshold pairs",
         seconds_since(t0));
}

void criterion_7() {
  const auto t0 = clock_type::now();
  AnchorGridSpec spec;
  spec.levels = {{8, 32.0}, {16, 64.0}, {32, 128.0}};
  const AnchorSet anchors = generate_anchors(spec, 256, 256);
  int atss_wins = 0;
  double sum1 = 0.0, sum2 = 0.0;
  std::size_t n1 = 0, n2 = 0;
  for (int scene = 0; scene < 100; ++scene) {
    testutil::Rng rng(9000 + scene);
    std::vector<OrientedBox> gts;
    for (int g = 0; g < 3; ++g) {
      const double w = rng.range(30, 90);
      gts.push_back(make_box(rng.range(60, 196), rng.range(60, 196), w, w / 5.0,
                             rng.range(-kPi / 4.0, 3.0 * kPi / 4.0)));
    }
    const AssignmentResult max_res = max_iou_assign(anchors.anchors, gts, {});
    TS4Config cfg;
    const TS4Result ts4 =
        ts4_assign(anchors, gts, synthetic_refiner(0.1, 9000 + scene), cfg);
    std::size_t max_pos = 0, atss_pos = 0;
    for (int label : max_res.labels) {
      max_pos += label >= 0;
    }
    for (std::size_t i = 0; i < ts4.stage1.labels.size(); ++i) {
      if (ts4.stage1.labels[i] >= 0) {
        ++atss_pos;
        sum1 += ts4.stage1.matched_iou[i];
        ++n1;
      }
      if (ts4.stage2.labels[i] >= 0) {
        sum2 += ts4.stage2.matched_iou[i];
        ++n2;
      }
    }
    atss_wins += atss_pos >= max_pos;
  }
  const bool richer = atss_wins >= 95;
  const bool tighter = n1 > 0 && n2 > 0 && sum2 / n2 > sum1 / n1;
  const double secs = seconds_since(t0);
  report(7, richer && tighter && secs < 60.0,
         "two-stage selection: more positives than max-iou in " +
             std::to_string(atss_wins) + "/100 thin-box scenes, refined stage "
             "raises mean positive iou",
         secs);
}

void criterion_8() {
  const auto t0 = clock_type::now();
  bool ok = true;
  for (double p : {0.05, 0.25, 0.5, 0.8, 0.99}) {
    ok = ok && std::abs(focal_loss(p, 1, 1.0, 0.0) + std::log(p)) <= 1e-12;
  }
  for (int label : {0, 1}) {
    for (double p : {0.12, 0.4, 0.77}) {
      ok = ok && finite_diff_check(
                     [label](double q) { return focal_loss(q, label); }, p,
                     focal_loss_grad(p, label)) <= 1e-5;
    }
  }
  for (double d : {0.3, -0.6, 1.7, -3.2}) {
    ok = ok && finite_diff_check([](double x) { return smooth_l1(x, 0.0); }, d,
                                 smooth_l1_grad(d, 0.0)) <= 1e-5;
  }
  const StageBatch s1 = make_stage_batch(
      {0.9, 0.8, 0.3, 0.2}, {1, 1, 0, 0},
      {{0.1, -0.2, 0.05, 0.0, 0.3},
       {2.0, 0.5, -1.5, 0.25, -0.4},
       {0, 0, 0, 0, 0},
       {0, 0, 0, 0, 0}},
      {{0, 0, 0, 0, 0},
       {0.5, 0.5, 0.5, 0.5, 0.5},
       {0, 0, 0, 0, 0},
       {0, 0, 0, 0, 0}});
  const StageBatch s2 = make_stage_batch({0.95, 0.4, 0.1}, {1, 0, 0},
                                         {{-0.3, 0.2, 1.2, -2.5, 0.45},
                                          {0, 0, 0, 0, 0},
                                          {0, 0, 0, 0, 0}},
                                         {{0.1, 0.1, 0.1, 0.1, 0.1},
                                          {0, 0, 0, 0, 0},
                                          {0, 0, 0, 0, 0}});
  ok = ok && std::abs(total_loss(s1, s2) - 4.3790232878571764) <= 1e-12;
  report(8, ok, "losses match cross-entropy, gradients and the frozen fixture",
         seconds_since(t0));
}

void criterion_9() {
  const auto t0 = clock_type::now();
  const auto det = [](double cx, double score) {
    return Detection{"im1", {cx, 10, 8, 4, 0}, score, 0};
  };
  const auto gt = [](double cx) {
    return GtInstance{"im1", {cx, 10, 8, 4, 0}, 0, false};
  };
  bool ok = true;
  for (MetricStyle style :
       {MetricStyle::VOC07, MetricStyle::VOC12, MetricStyle::COCO}) {
    const EvalReport r = evaluate_detections({det(10, 0.9)}, {gt(10)}, style);
    ok = ok && std::abs(r.map - 1.0) <= 1e-12;
  }
  const std::vector<Detection> dets{det(10, 0.95), det(70, 0.90), det(30, 0.80),
                                    det(10, 0.70), det(50, 0.60)};
  const std::vector<GtInstance> gts{gt(10), gt(30), gt(50)};
  const EvalReport v07 = evaluate_detections(dets, gts, MetricStyle::VOC07);
  const EvalReport v12 = evaluate_detections(dets, gts, MetricStyle::VOC12);
  const EvalReport coco = evaluate_detections(dets, gts, MetricStyle::COCO);
  ok = ok && std::abs(v07.map - 42.0 / 55.0) <= 1e-6;
  ok = ok && std::abs(v12.map - 34.0 / 45.0) <= 1e-6;
  ok = ok && coco.map <= coco.ap50 + 1e-12;
  std::vector<Detection> offset = dets;
  offset[4].box.cx += 1.0;  // partial-overlap variant
  const EvalReport coco2 = evaluate_detections(offset, gts, MetricStyle::COCO);
  ok = ok && coco2.map <= coco2.ap50 + 1e-12;
  report(9, ok, "ap fixtures hit their precomputed values in every style",
         seconds_since(t0));
}

void criterion_10() {
  const auto t0 = clock_type::now();
  const std::string text =
      "# image=P1\n"
      "12.5 9.25 30 10 0.4 plane 0\n"
      "50 50 8 3 -0.5 car 1\n";
  const AnnotationRecord rec = parse_theta_file(text);
  const std::string once = write_canonical(rec);
  const std::string twice = write_canonical(parse_theta_file(once));
  bool ok = once == twice;

  AnnotationRecord scene;
  scene.image_id = "big";
  Instance inst;
  inst.box = OrientedBox{1024, 1024, 200, 100, 0.3};
  inst.cls = "target";
  scene.instances.push_back(inst);
  const std::vector<TilePatch> patches = tile_annotations(scene, 2048, 2048);
  ok = ok && patches.size() == 9;
  if (ok) {
    const TilePatch& mid = patches[4];
    ok = mid.x == 824 && mid.y == 824 && mid.record.instances.size() == 1 &&
         std::abs(mid.record.instances[0].box.cx - 200.0) <= 1e-9 &&
         std::abs(mid.record.instances[0].box.cy - 200.0) <= 1e-9;
  }
  report(10, ok, "canonical files are a parser fixed point, 2048 scene tiles "
                 "into 9 translated patches",
         seconds_since(t0));
}

void criterion_11() {
  const auto t0 = clock_type::now();
  testutil::Rng rng(1111);
  const auto scatter = [&rng](std::size_t n) {
    std::vector<OrientedBox> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = rng.range(20, 200);
      out.push_back(make_box(rng.range(100, 4000), rng.range(100, 4000), w,
                             rng.range(10, w), rng.range(-kPi / 4, 3 * kPi / 4)));
    }
    return out;
  };
  const std::vector<OrientedBox> a = scatter(1000);
  const std::vector<OrientedBox> b = scatter(1000);
  const auto m0 = clock_type::now();
  IoUMatrixOptions opts;
  const IoUMatrix matrix = iou_matrix(a, b, opts);
  const double matrix_secs = seconds_since(m0);

  const std::vector<OrientedBox> boxes = scatter(5000);
  std::vector<double> scores;
  scores.reserve(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    scores.push_back(rng.unit());
  }
  const auto n0 = clock_type::now();
  const std::vector<std::size_t> kept = rotated_nms(boxes, scores, 0.5);
  const double nms_secs = seconds_since(n0);

  IoUMatrixOptions serial;
  serial.threads = 1;
  IoUMatrixOptions wide;
  wide.threads = 4;
  const bool identical =
      iou_matrix(a, b, serial).values == iou_matrix(a, b, wide).values;

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "1000x1000 matrix %.3f s, 5000-box nms %.3f s (kept %zu), "
                "thread counts bit-identical",
                matrix_secs, nms_secs, kept.size());
  report(11,
         matrix_secs < 1.0 && nms_secs < 2.0 && identical && !matrix.values.empty(),
         buf, seconds_since(t0));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  if (failures == 0) {
    std::printf("all 11 criteria passed\n");
  } else {
    std::printf("%d criteria FAILED\n", failures);
  }
  return failures == 0 ? 0 : 1;
}
