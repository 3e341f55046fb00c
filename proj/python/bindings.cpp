#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rotdet/annotations.hpp"
#include "rotdet/assign.hpp"
#include "rotdet/coding.hpp"
#include "rotdet/eval.hpp"
#include "rotdet/geometry.hpp"
#include "rotdet/loss.hpp"

namespace py = pybind11;
using namespace rotdet;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rotated-box geometry, label assignment and evaluation core";

  py::enum_<AngleMode>(m, "AngleMode")
      .value("Detection", AngleMode::Detection)
      .value("Orientation", AngleMode::Orientation);

  py::class_<OrientedBox>(m, "OrientedBox")
      .def(py::init<>())
      .def(py::init([](double cx, double cy, double w, double h, double theta) {
             return OrientedBox{cx, cy, w, h, theta};
           }),
           py::arg("cx"), py::arg("cy"), py::arg("w"), py::arg("h"),
           py::arg("theta"))
      .def_readwrite("cx", &OrientedBox::cx)
      .def_readwrite("cy", &OrientedBox::cy)
      .def_readwrite("w", &OrientedBox::w)
      .def_readwrite("h", &OrientedBox::h)
      .def_readwrite("theta", &OrientedBox::theta)
      .def("area", &OrientedBox::area)
      .def("__repr__", [](const OrientedBox& b) {
        std::ostringstream os;
        os << "OrientedBox(cx=" << b.cx << ", cy=" << b.cy << ", w=" << b.w
           << ", h=" << b.h << ", theta=" << b.theta << ")";
        return os.str();
      });

  py::class_<BoxOffsets>(m, "BoxOffsets")
      .def(py::init<>())
      .def(py::init([](double tx, double ty, double tw, double th, double tt) {
             return BoxOffsets{tx, ty, tw, th, tt};
           }),
           py::arg("tx"), py::arg("ty"), py::arg("tw"), py::arg("th"),
           py::arg("ttheta"))
      .def_readwrite("tx", &BoxOffsets::tx)
      .def_readwrite("ty", &BoxOffsets::ty)
      .def_readwrite("tw", &BoxOffsets::tw)
      .def_readwrite("th", &BoxOffsets::th)
      .def_readwrite("ttheta", &BoxOffsets::ttheta);

  m.def("normalize_angle", &normalize_angle, py::arg("theta"),
        py::arg("mode") = AngleMode::Detection,
        "Wrap an angle into the canonical range of the given mode");
  m.def("make_box", &make_box, py::arg("cx"), py::arg("cy"), py::arg("w"),
        py::arg("h"), py::arg("theta"),
        py::arg("mode") = AngleMode::Detection);
  m.def(
      "canonicalize",
      [](const OrientedBox& b, AngleMode mode) { return canonicalize(b, mode); },
      py::arg("box"), py::arg("mode") = AngleMode::Detection);
  m.def(
      "corners",
      [](const OrientedBox& b) {
        const QuadBox q = to_corners(b);
        std::vector<std::pair<double, double>> out;
        for (const Vec2& v : q.vertices) {
          out.emplace_back(v.x, v.y);
        }
        return out;
      },
      py::arg("box"), "Corner coordinates as four (x, y) pairs");
  m.def(
      "from_quad",
      [](const std::vector<std::pair<double, double>>& pts, AngleMode mode) {
        if (pts.size() != 4) {
          throw std::invalid_argument("from_quad: need exactly 4 points");
        }
        QuadBox q;
        for (int i = 0; i < 4; ++i) {
          q.vertices[i] = {pts[i].first, pts[i].second};
        }
        return from_quad(canonicalize(q), mode);
      },
      py::arg("points"), py::arg("mode") = AngleMode::Detection,
      "Min-area oriented box through four corner points");
  m.def(
      "min_area_rect",
      [](const std::vector<std::pair<double, double>>& pts, AngleMode mode) {
        std::vector<Vec2> v;
        v.reserve(pts.size());
        for (const auto& p : pts) {
          v.push_back({p.first, p.second});
        }
        return min_area_rect(v, mode);
      },
      py::arg("points"), py::arg("mode") = AngleMode::Detection);

  m.def("rotated_iou", &rotated_iou, py::arg("a"), py::arg("b"),
        "Exact IoU of two oriented boxes");
  m.def(
      "iou_matrix",
      [](const std::vector<OrientedBox>& a, const std::vector<OrientedBox>& b,
         int threads) {
        IoUMatrixOptions opts;
        opts.threads = threads;
        const IoUMatrix mat = iou_matrix(a, b, opts);
        std::vector<std::vector<double>> out(mat.rows);
        for (std::size_t i = 0; i < mat.rows; ++i) {
          out[i].assign(mat.values.begin() + i * mat.cols,
                        mat.values.begin() + (i + 1) * mat.cols);
        }
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("threads") = 0);
  m.def("rotated_nms", &rotated_nms, py::arg("boxes"), py::arg("scores"),
        py::arg("iou_threshold"),
        "Kept indices in descending score order");
  m.def("monte_carlo_iou", &monte_carlo_iou, py::arg("a"), py::arg("b"),
        py::arg("samples") = 200000, py::arg("seed") = 0);

  m.def("encode", &encode, py::arg("gt"), py::arg("anchor"),
        py::arg("mode") = AngleMode::Detection);
  m.def(
      "decode",
      [](const OrientedBox& anchor, const BoxOffsets& t, AngleMode mode) {
        return decode(anchor, t, mode);
      },
      py::arg("anchor"), py::arg("offsets"),
      py::arg("mode") = AngleMode::Detection);
  m.def("refine_anchors", &refine_anchors, py::arg("anchors"),
        py::arg("offsets"), py::arg("mode") = AngleMode::Detection);

  py::class_<AnchorSet>(m, "AnchorSet")
      .def_readonly("anchors", &AnchorSet::anchors)
      .def_readonly("level_of", &AnchorSet::level_of)
      .def("__len__", [](const AnchorSet& s) { return s.anchors.size(); });
  m.def(
      "generate_anchors",
      [](int image_w, int image_h, const std::vector<double>& angles) {
        AnchorGridSpec spec = AnchorGridSpec::retina_default();
        spec.angles = angles;
        return generate_anchors(spec, image_w, image_h);
      },
      py::arg("image_w"), py::arg("image_h"),
      py::arg("angles") = std::vector<double>{0.0},
      "Default five-level anchor grid");

  py::class_<AssignmentResult>(m, "AssignmentResult")
      .def_readonly("labels", &AssignmentResult::labels)
      .def_readonly("matched_iou", &AssignmentResult::matched_iou);
  py::class_<TS4Result>(m, "TS4Result")
      .def_readonly("stage1", &TS4Result::stage1)
      .def_readonly("refined", &TS4Result::refined)
      .def_readonly("stage2", &TS4Result::stage2);

  m.def(
      "max_iou_assign",
      [](const std::vector<OrientedBox>& anchors,
         const std::vector<OrientedBox>& gts, double pos_iou, double neg_iou,
         bool force_match) {
        AssignerConfig cfg;
        cfg.pos_iou = pos_iou;
        cfg.neg_iou = neg_iou;
        cfg.force_match = force_match;
        return max_iou_assign(anchors, gts, cfg);
      },
      py::arg("anchors"), py::arg("gts"), py::arg("pos_iou") = 0.5,
      py::arg("neg_iou") = 0.4, py::arg("force_match") = true);
  m.def(
      "atss_assign",
      [](const AnchorSet& anchors, const std::vector<OrientedBox>& gts,
         int topk) {
        AssignerConfig cfg;
        cfg.topk = topk;
        return atss_assign(anchors, gts, cfg);
      },
      py::arg("anchors"), py::arg("gts"), py::arg("topk") = 9);
  m.def(
      "ts4_assign",
      [](const AnchorSet& anchors, const std::vector<OrientedBox>& gts,
         double noise, std::uint64_t seed) {
        return ts4_assign(anchors, gts, synthetic_refiner(noise, seed));
      },
      py::arg("anchors"), py::arg("gts"), py::arg("noise") = 0.0,
      py::arg("seed") = 0,
      "Two-stage assignment with the synthetic refinement head");

  m.def("focal_loss", &focal_loss, py::arg("p"), py::arg("label"),
        py::arg("alpha") = 0.25, py::arg("gamma") = 2.0);
  m.def("smooth_l1", &smooth_l1, py::arg("pred"), py::arg("target"),
        py::arg("beta") = 1.0);

  py::enum_<MetricStyle>(m, "MetricStyle")
      .value("VOC07", MetricStyle::VOC07)
      .value("VOC12", MetricStyle::VOC12)
      .value("COCO", MetricStyle::COCO);
  py::class_<Detection>(m, "Detection")
      .def(py::init([](const std::string& image_id, const OrientedBox& box,
                       double score, int cls) {
             return Detection{image_id, box, score, cls};
           }),
           py::arg("image_id"), py::arg("box"), py::arg("score"),
           py::arg("cls"))
      .def_readwrite("image_id", &Detection::image_id)
      .def_readwrite("box", &Detection::box)
      .def_readwrite("score", &Detection::score)
      .def_readwrite("cls", &Detection::cls);
  py::class_<GtInstance>(m, "GtInstance")
      .def(py::init([](const std::string& image_id, const OrientedBox& box,
                       int cls, bool difficult) {
             return GtInstance{image_id, box, cls, difficult};
           }),
           py::arg("image_id"), py::arg("box"), py::arg("cls"),
           py::arg("difficult") = false)
      .def_readwrite("image_id", &GtInstance::image_id)
      .def_readwrite("box", &GtInstance::box)
      .def_readwrite("cls", &GtInstance::cls)
      .def_readwrite("difficult", &GtInstance::difficult);
  py::class_<ClassEval>(m, "ClassEval")
      .def_readonly("cls", &ClassEval::cls)
      .def_readonly("num_gt", &ClassEval::num_gt)
      .def_readonly("num_det", &ClassEval::num_det)
      .def_readonly("precision", &ClassEval::precision)
      .def_readonly("recall", &ClassEval::recall)
      .def_readonly("ap", &ClassEval::ap);
  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("style", &EvalReport::style)
      .def_readonly("thresholds", &EvalReport::thresholds)
      .def_readonly("classes", &EvalReport::classes)
      .def_readonly("map", &EvalReport::map)
      .def_readonly("ap50", &EvalReport::ap50)
      .def_readonly("ap75", &EvalReport::ap75)
      .def("text", [](const EvalReport& r) { return to_text(r); })
      .def("csv", [](const EvalReport& r) { return pr_csv(r); });
  m.def("evaluate_detections", &evaluate_detections, py::arg("dets"),
        py::arg("gts"), py::arg("style") = MetricStyle::VOC07,
        py::arg("iou_thresholds") = std::vector<double>{});
}
