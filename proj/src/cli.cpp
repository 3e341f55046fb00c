#include "rotdet/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "rotdet/annotations.hpp"
#include "rotdet/assign.hpp"
#include "rotdet/eval.hpp"
#include "rotdet/geometry.hpp"

namespace rotdet {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  out << content;
}

std::string stem_of(const std::string& path) {
  const std::string stem = std::filesystem::path(path).stem().string();
  return stem.empty() ? "unknown" : stem;
}

AngleMode mode_from(const std::string& name) {
  if (name == "detection") return AngleMode::Detection;
  if (name == "orientation") return AngleMode::Orientation;
  throw CLI::ValidationError("--mode", "must be detection or orientation");
}

AnnotationRecord load_annotations(const std::string& path,
                                  const std::string& format, AngleMode mode,
                                  bool degrees) {
  const std::string text = read_file(path);
  if (format == "quad") {
    return parse_quad_file(text, stem_of(path));
  }
  std::vector<std::string> warnings;
  AnnotationRecord rec =
      parse_theta_file(text, mode, stem_of(path), degrees, &warnings);
  for (const std::string& w : warnings) {
    std::cerr << path << ": warning: " << w << '\n';
  }
  return rec;
}

std::vector<OrientedBox> boxes_of(const AnnotationRecord& rec) {
  std::vector<OrientedBox> out;
  out.reserve(rec.instances.size());
  for (const Instance& inst : rec.instances) {
    out.push_back(inst.box);
  }
  return out;
}

// Deterministic scene for bench: mt19937_64 with a fixed mantissa mapping so
// the checksum is reproducible across standard libraries.
std::vector<OrientedBox> random_boxes(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto unit = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  std::vector<OrientedBox> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 20.0 + 180.0 * unit();
    const double h = 10.0 + (w - 10.0) * unit();
    out.push_back(make_box(100.0 + 3900.0 * unit(), 100.0 + 3900.0 * unit(),
                           std::max(w, h), std::min(w, h),
                           -kPi / 4.0 + kPi * unit()));
  }
  return out;
}

struct IouOpts {
  std::string file_a, file_b;
  std::string mode = "detection";
  std::string format = "theta";
  int threads = 0;
};

void run_iou(const IouOpts& o) {
  const AngleMode mode = mode_from(o.mode);
  const std::vector<OrientedBox> a =
      boxes_of(load_annotations(o.file_a, o.format, mode, false));
  const std::vector<OrientedBox> b =
      boxes_of(load_annotations(o.file_b, o.format, mode, false));
  IoUMatrixOptions opts;
  opts.threads = o.threads;
  const IoUMatrix m = iou_matrix(a, b, opts);
  std::cout << "rows " << m.rows << " cols " << m.cols << '\n'
            << std::fixed << std::setprecision(6);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      std::cout << (j ? " " : "") << m.at(i, j);
    }
    std::cout << '\n';
  }
}

struct NmsOpts {
  std::string file;
  double threshold = 0.5;
};

void run_nms(const NmsOpts& o) {
  const std::vector<DetFileEntry> entries = parse_detection_file(read_file(o.file));
  // Suppression runs independently per image and class.
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    groups[{entries[i].image_id, entries[i].cls}].push_back(i);
  }
  std::vector<DetFileEntry> kept;
  for (const auto& [key, idx] : groups) {
    std::vector<OrientedBox> boxes;
    std::vector<double> scores;
    for (std::size_t i : idx) {
      boxes.push_back(entries[i].box);
      scores.push_back(entries[i].score);
    }
    for (std::size_t k : rotated_nms(boxes, scores, o.threshold)) {
      kept.push_back(entries[idx[k]]);
    }
  }
  std::cout << write_detection_file(kept);
}

struct AssignOpts {
  std::string file;
  std::string strategy = "max-iou";
  std::string compare;
  std::string format = "theta";
  std::string out;
  std::vector<int> image_size{1024, 1024};
  std::vector<double> angles{0.0};
  double pos_iou = 0.5;
  double neg_iou = 0.4;
  int topk = 9;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

void print_assignment(const std::string& name, const AssignmentResult& res,
                      std::size_t num_gts) {
  std::cout << "strategy " << name << '\n' << to_text(summarize(res, num_gts));
}

void dump_assignment(std::ostream& os, const std::string& name,
                     const AssignmentResult& res) {
  os << std::fixed << std::setprecision(6);
  os << "# strategy " << name << '\n';
  for (std::size_t i = 0; i < res.labels.size(); ++i) {
    if (res.labels[i] == kNegative) {
      continue;
    }
    os << "anchor " << i << ' '
       << (res.labels[i] == kIgnore ? std::string("ignore")
                                    : std::to_string(res.labels[i]))
       << ' ' << res.matched_iou[i] << '\n';
  }
}

void run_assign(const AssignOpts& o) {
  const AnnotationRecord rec =
      load_annotations(o.file, o.format, AngleMode::Detection, false);
  const std::vector<OrientedBox> gts = boxes_of(rec);
  AnchorGridSpec spec = AnchorGridSpec::retina_default();
  spec.angles = o.angles;
  const AnchorSet anchors = generate_anchors(spec, o.image_size[0], o.image_size[1]);
  AssignerConfig cfg;
  cfg.pos_iou = o.pos_iou;
  cfg.neg_iou = o.neg_iou;
  cfg.topk = o.topk;

  std::ostringstream dump;
  const auto run_one = [&](const std::string& name) {
    if (name == "max-iou") {
      const AssignmentResult res = max_iou_assign(anchors.anchors, gts, cfg);
      print_assignment(name, res, gts.size());
      dump_assignment(dump, name, res);
    } else if (name == "atss") {
      const AssignmentResult res = atss_assign(anchors, gts, cfg);
      print_assignment(name, res, gts.size());
      dump_assignment(dump, name, res);
    } else if (name == "ts4") {
      TS4Config tcfg;
      tcfg.stage1 = cfg;
      const TS4Result res =
          ts4_assign(anchors, gts, synthetic_refiner(o.noise, o.seed), tcfg);
      print_assignment("ts4-stage1", res.stage1, gts.size());
      print_assignment("ts4-stage2", res.stage2, gts.size());
      dump_assignment(dump, "ts4-stage1", res.stage1);
      dump_assignment(dump, "ts4-stage2", res.stage2);
    } else {
      throw CLI::ValidationError("--strategy",
                                 "must be max-iou, atss or ts4");
    }
  };
  run_one(o.strategy);
  if (!o.compare.empty()) {
    run_one(o.compare);
  }
  if (!o.out.empty()) {
    write_file(o.out, dump.str());
  }
}

struct EvalOpts {
  std::string det_file;
  std::vector<std::string> gt_files;
  std::string style = "voc07";
  std::string format = "theta";
  std::string csv;
  std::vector<double> thresholds;
};

MetricStyle style_from(const std::string& name) {
  if (name == "voc07") return MetricStyle::VOC07;
  if (name == "voc12") return MetricStyle::VOC12;
  if (name == "coco") return MetricStyle::COCO;
  throw CLI::ValidationError("--style", "must be voc07, voc12 or coco");
}

void run_eval(const EvalOpts& o) {
  const std::vector<DetFileEntry> det_entries =
      parse_detection_file(read_file(o.det_file));
  std::vector<GtInstance> gts;
  std::map<std::string, int> class_ids;
  for (const std::string& path : o.gt_files) {
    const AnnotationRecord rec =
        load_annotations(path, o.format, AngleMode::Detection, false);
    for (const Instance& inst : rec.instances) {
      class_ids.emplace(inst.cls, 0);
      gts.push_back({rec.image_id, inst.box, 0, inst.difficult});
    }
  }
  for (const DetFileEntry& e : det_entries) {
    class_ids.emplace(e.cls, 0);
  }
  int next = 0;
  for (auto& [name, id] : class_ids) {
    id = next++;
  }
  {
    std::size_t g = 0;
    for (const std::string& path : o.gt_files) {
      const AnnotationRecord rec =
          load_annotations(path, o.format, AngleMode::Detection, false);
      for (const Instance& inst : rec.instances) {
        gts[g++].cls = class_ids.at(inst.cls);
      }
    }
  }
  std::vector<Detection> dets;
  dets.reserve(det_entries.size());
  for (const DetFileEntry& e : det_entries) {
    dets.push_back({e.image_id, e.box, e.score, class_ids.at(e.cls)});
  }
  const EvalReport report =
      evaluate_detections(dets, gts, style_from(o.style), o.thresholds);
  for (const auto& [name, id] : class_ids) {
    std::cout << "class_map " << id << ' ' << name << '\n';
  }
  std::cout << to_text(report);
  if (!o.csv.empty()) {
    write_file(o.csv, pr_csv(report));
  }
}

struct TileOpts {
  std::string file;
  std::string format = "theta";
  std::string out_dir;
  std::vector<int> image_size;
  std::vector<int> patch{1024, 1024};
  int stride = 824;
  double min_area = 0.5;
};

void run_tile(const TileOpts& o) {
  const AnnotationRecord rec =
      load_annotations(o.file, o.format, AngleMode::Detection, false);
  TilingSpec spec;
  spec.patch_w = o.patch[0];
  spec.patch_h = o.patch[1];
  spec.stride = o.stride;
  spec.min_area_kept = o.min_area;
  const std::vector<TilePatch> patches =
      tile_annotations(rec, o.image_size[0], o.image_size[1], spec);
  for (const TilePatch& p : patches) {
    std::cout << "patch " << p.x << ' ' << p.y << ' ' << p.w << ' ' << p.h
              << " instances " << p.record.instances.size() << '\n';
    if (!o.out_dir.empty()) {
      std::filesystem::create_directories(o.out_dir);
      write_file((std::filesystem::path(o.out_dir) /
                  (p.record.image_id + ".txt"))
                     .string(),
                 write_canonical(p.record));
    }
  }
  std::cout << "patches " << patches.size() << '\n';
}

struct ConvertOpts {
  std::string file;
  std::string from = "quad";
  std::string to = "theta";
  std::string mode = "detection";
  std::string out;
  bool degrees = false;
};

void run_convert(const ConvertOpts& o) {
  const AnnotationRecord rec =
      load_annotations(o.file, o.from, mode_from(o.mode), o.degrees);
  const std::string text = o.to == "quad" ? write_quad(rec) : write_canonical(rec);
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file(o.out, text);
  }
}

struct StatsOpts {
  std::vector<std::string> files;
  std::string format = "theta";
  std::string mode = "detection";
};

void run_stats(const StatsOpts& o) {
  std::vector<AnnotationRecord> records;
  records.reserve(o.files.size());
  for (const std::string& path : o.files) {
    records.push_back(load_annotations(path, o.format, mode_from(o.mode), false));
  }
  std::cout << to_text(dataset_stats(records));
}

struct BenchOpts {
  int matrix = 1000;
  int nms = 5000;
  int threads = 0;
  std::uint64_t seed = 7;
};

void run_bench(const BenchOpts& o) {
  using clock = std::chrono::steady_clock;
  std::cout << std::fixed << std::setprecision(6);
  if (o.matrix > 0) {
    const std::vector<OrientedBox> a = random_boxes(o.matrix, o.seed);
    const std::vector<OrientedBox> b = random_boxes(o.matrix, o.seed + 1);
    IoUMatrixOptions opts;
    opts.threads = o.threads;
    const auto t0 = clock::now();
    const IoUMatrix m = iou_matrix(a, b, opts);
    const auto t1 = clock::now();
    double checksum = 0.0;
    for (double v : m.values) {
      checksum += v;
    }
    std::cout << "iou_matrix " << o.matrix << "x" << o.matrix << ' '
              << std::chrono::duration<double>(t1 - t0).count()
              << " s checksum " << checksum << '\n';
  }
  if (o.nms > 0) {
    const std::vector<OrientedBox> boxes = random_boxes(o.nms, o.seed + 2);
    std::mt19937_64 rng(o.seed + 3);
    std::vector<double> scores;
    scores.reserve(boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      scores.push_back(static_cast<double>(rng() >> 11) * 0x1.0p-53);
    }
    const auto t0 = clock::now();
    const std::vector<std::size_t> kept = rotated_nms(boxes, scores, 0.5);
    const auto t1 = clock::now();
    std::cout << "nms " << o.nms << ' '
              << std::chrono::duration<double>(t1 - t0).count() << " s kept "
              << kept.size() << '\n';
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"rotated-box geometry, assignment and evaluation toolkit"};
  app.require_subcommand(1);

  auto iou_opts = std::make_shared<IouOpts>();
  CLI::App* iou = app.add_subcommand("iou", "pairwise rotated IoU matrix of two box files");
  iou->add_option("file_a", iou_opts->file_a, "first box file")->required();
  iou->add_option("file_b", iou_opts->file_b, "second box file")->required();
  iou->add_option("--mode", iou_opts->mode, "detection|orientation");
  iou->add_option("--format", iou_opts->format, "theta|quad");
  iou->add_option("--threads", iou_opts->threads, "worker threads, 0 = auto");
  iou->callback([iou_opts] { run_iou(*iou_opts); });

  auto nms_opts = std::make_shared<NmsOpts>();
  CLI::App* nms = app.add_subcommand("nms", "greedy rotated NMS over a detection file");
  nms->add_option("file", nms_opts->file, "detection file")->required();
  nms->add_option("--iou-threshold", nms_opts->threshold, "suppression threshold");
  nms->callback([nms_opts] { run_nms(*nms_opts); });

  auto assign_opts = std::make_shared<AssignOpts>();
  CLI::App* assign = app.add_subcommand("assign", "label assignment over generated anchors");
  assign->add_option("file", assign_opts->file, "annotation file")->required();
  assign->add_option("--strategy", assign_opts->strategy, "max-iou|atss|ts4");
  assign->add_option("--compare", assign_opts->compare, "second strategy to run");
  assign->add_option("--format", assign_opts->format, "theta|quad");
  assign->add_option("--out", assign_opts->out, "write per-anchor assignment file");
  assign->add_option("--image-size", assign_opts->image_size, "width height")
      ->expected(2);
  assign->add_option("--angles", assign_opts->angles, "anchor angles in radians");
  assign->add_option("--pos-iou", assign_opts->pos_iou, "positive threshold");
  assign->add_option("--neg-iou", assign_opts->neg_iou, "negative threshold");
  assign->add_option("--topk", assign_opts->topk, "candidates per level");
  assign->add_option("--noise", assign_opts->noise, "refiner noise sigma");
  assign->add_option("--seed", assign_opts->seed, "refiner seed");
  assign->callback([assign_opts] { run_assign(*assign_opts); });

  auto eval_opts = std::make_shared<EvalOpts>();
  CLI::App* ev = app.add_subcommand("eval", "AP / mAP of a detection file against ground truth");
  ev->add_option("--dets", eval_opts->det_file, "detection file")->required();
  ev->add_option("--gt", eval_opts->gt_files, "ground-truth annotation files")
      ->required();
  ev->add_option("--style", eval_opts->style, "voc07|voc12|coco");
  ev->add_option("--format", eval_opts->format, "theta|quad");
  ev->add_option("--iou", eval_opts->thresholds, "IoU thresholds");
  ev->add_option("--csv", eval_opts->csv, "write PR curve CSV");
  ev->callback([eval_opts] { run_eval(*eval_opts); });

  auto tile_opts = std::make_shared<TileOpts>();
  CLI::App* tile = app.add_subcommand("tile", "split large-scene annotations into patches");
  tile->add_option("file", tile_opts->file, "annotation file")->required();
  tile->add_option("--image-size", tile_opts->image_size, "width height")
      ->expected(2)
      ->required();
  tile->add_option("--patch", tile_opts->patch, "patch width height")->expected(2);
  tile->add_option("--stride", tile_opts->stride, "grid stride in pixels");
  tile->add_option("--min-area", tile_opts->min_area, "kept-area fraction");
  tile->add_option("--format", tile_opts->format, "theta|quad");
  tile->add_option("--out-dir", tile_opts->out_dir, "write per-patch files here");
  tile->callback([tile_opts] { run_tile(*tile_opts); });

  auto conv_opts = std::make_shared<ConvertOpts>();
  CLI::App* conv = app.add_subcommand("convert", "convert between quad and theta formats");
  conv->add_option("file", conv_opts->file, "input file")->required();
  conv->add_option("--from", conv_opts->from, "quad|theta");
  conv->add_option("--to", conv_opts->to, "quad|theta");
  conv->add_option("--mode", conv_opts->mode, "detection|orientation");
  conv->add_flag("--degrees", conv_opts->degrees, "input angles in degrees");
  conv->add_option("-o,--out", conv_opts->out, "output file (default stdout)");
  conv->callback([conv_opts] { run_convert(*conv_opts); });

  auto stats_opts = std::make_shared<StatsOpts>();
  CLI::App* stats = app.add_subcommand("stats", "dataset statistics over annotation files");
  stats->add_option("files", stats_opts->files, "annotation files")->required();
  stats->add_option("--format", stats_opts->format, "theta|quad");
  stats->add_option("--mode", stats_opts->mode, "detection|orientation");
  stats->callback([stats_opts] { run_stats(*stats_opts); });

  auto bench_opts = std::make_shared<BenchOpts>();
  CLI::App* bench = app.add_subcommand("bench", "time iou_matrix and rotated_nms");
  bench->add_option("--matrix", bench_opts->matrix, "matrix side, 0 to skip");
  bench->add_option("--nms", bench_opts->nms, "box count, 0 to skip");
  bench->add_option("--threads", bench_opts->threads, "worker threads, 0 = auto");
  bench->add_option("--seed", bench_opts->seed, "scene seed");
  bench->callback([bench_opts] { run_bench(*bench_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace rotdet
