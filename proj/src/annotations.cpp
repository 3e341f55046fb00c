#include "rotdet/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <sstream>

#include "rotdet/geometry.hpp"

namespace rotdet {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) {
    out.push_back(tok);
  }
  return out;
}

double parse_real(const std::string& tok, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v)) {
    throw ParseError(line_no, "expected a number, got '" + tok + "'");
  }
  return v;
}

bool parse_difficult(const std::string& tok, std::size_t line_no) {
  if (tok == "0") return false;
  if (tok == "1") return true;
  throw ParseError(line_no, "difficult flag must be 0 or 1, got '" + tok + "'");
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

void write_box_fields(std::ostream& os, const OrientedBox& b) {
  os << b.cx << ' ' << b.cy << ' ' << b.w << ' ' << b.h << ' ' << b.theta;
}

}  // namespace

AnnotationRecord parse_quad_file(const std::string& text,
                                 const std::string& image_id) {
  AnnotationRecord rec;
  rec.image_id = image_id;
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (blank(line) || trim(line)[0] == '#') {
      continue;
    }
    const std::vector<std::string> tok = split_ws(line);
    if (tok.size() != 9 && tok.size() != 10) {
      throw ParseError(line_no, "expected 8 coordinates, class and optional "
                                "difficult flag, got " +
                                    std::to_string(tok.size()) + " fields");
    }
    QuadBox quad;
    for (int i = 0; i < 4; ++i) {
      quad.vertices[i] = {parse_real(tok[2 * i], line_no),
                          parse_real(tok[2 * i + 1], line_no)};
    }
    Instance inst;
    try {
      inst.quad = canonicalize(quad);
      inst.box = from_quad(*inst.quad);
    } catch (const std::exception& e) {
      throw ParseError(line_no, std::string("bad quad: ") + e.what());
    }
    inst.cls = tok[8];
    if (tok.size() == 10) {
      inst.difficult = parse_difficult(tok[9], line_no);
    }
    rec.instances.push_back(std::move(inst));
  }
  return rec;
}

AnnotationRecord parse_theta_file(const std::string& text, AngleMode mode,
                                  const std::string& image_id, bool degrees,
                                  std::vector<std::string>* warnings) {
  AnnotationRecord rec;
  rec.image_id = image_id;
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (blank(line)) {
      continue;
    }
    const std::string t = trim(line);
    if (t[0] == '#') {
      const std::string body = trim(t.substr(1));
      if (body.rfind("image=", 0) == 0) {
        const std::string id = trim(body.substr(6));
        if (!id.empty()) {
          rec.image_id = id;
        }
      }
      continue;
    }
    const std::vector<std::string> tok = split_ws(t);
    if (tok.size() != 6 && tok.size() != 7) {
      throw ParseError(line_no, "expected cx cy w h theta class [difficult], "
                                "got " +
                                    std::to_string(tok.size()) + " fields");
    }
    const double cx = parse_real(tok[0], line_no);
    const double cy = parse_real(tok[1], line_no);
    const double w = parse_real(tok[2], line_no);
    const double h = parse_real(tok[3], line_no);
    double theta = parse_real(tok[4], line_no);
    if (degrees) {
      theta *= kPi / 180.0;
    }
    if (w <= 0.0 || h <= 0.0) {
      throw ParseError(line_no, "non-positive box side");
    }
    if (std::abs(theta) > 2.0 * kPi && warnings != nullptr) {
      std::ostringstream w_os;
      w_os << "line " << line_no << ": theta " << theta
           << " beyond a full turn, wrapped";
      warnings->push_back(w_os.str());
    }
    Instance inst;
    if (mode == AngleMode::Orientation) {
      inst.head_angle = normalize_angle(theta, AngleMode::Orientation);
    }
    try {
      inst.box = canonicalize({cx, cy, w, h, theta}, mode);
    } catch (const std::exception& e) {
      throw ParseError(line_no, std::string("bad box: ") + e.what());
    }
    inst.cls = tok[5];
    if (tok.size() == 7) {
      inst.difficult = parse_difficult(tok[6], line_no);
    }
    rec.instances.push_back(std::move(inst));
  }
  return rec;
}

std::string write_canonical(const AnnotationRecord& record) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6);
  os << "# rotdet-annotations v1\n";
  os << "# image=" << record.image_id << '\n';
  os << "# fields: cx cy w h theta class difficult\n";
  for (const Instance& inst : record.instances) {
    write_box_fields(os, inst.box);
    os << ' ' << inst.cls << ' ' << (inst.difficult ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string write_quad(const AnnotationRecord& record) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6);
  for (const Instance& inst : record.instances) {
    const QuadBox q = inst.quad ? *inst.quad : to_corners(inst.box);
    for (const Vec2& v : q.vertices) {
      os << v.x << ' ' << v.y << ' ';
    }
    os << inst.cls << ' ' << (inst.difficult ? 1 : 0) << '\n';
  }
  return os.str();
}

namespace {

std::vector<int> grid_origins(int image_dim, int patch_dim, int stride) {
  std::vector<int> origins;
  if (image_dim <= patch_dim) {
    origins.push_back(0);
    return origins;
  }
  int o = 0;
  while (true) {
    if (o + patch_dim >= image_dim) {
      origins.push_back(image_dim - patch_dim);
      break;
    }
    origins.push_back(o);
    o += stride;
  }
  return origins;
}

std::vector<Vec2> instance_polygon(const Instance& inst) {
  const QuadBox q = inst.quad ? *inst.quad : to_corners(inst.box);
  return {q.vertices.begin(), q.vertices.end()};
}

double polygon_area(const std::vector<Vec2>& poly) {
  if (poly.size() < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    acc += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * acc;
}

}  // namespace

std::vector<TilePatch> tile_annotations(const AnnotationRecord& record,
                                        int image_w, int image_h,
                                        const TilingSpec& spec) {
  if (image_w < 1 || image_h < 1) {
    throw std::invalid_argument("tile_annotations: image size must be positive");
  }
  if (spec.patch_w < 1 || spec.patch_h < 1 || spec.stride < 1 ||
      spec.stride > std::max(spec.patch_w, spec.patch_h)) {
    throw std::invalid_argument("tile_annotations: bad patch/stride");
  }
  if (!(spec.min_area_kept >= 0.0 && spec.min_area_kept <= 1.0)) {
    throw std::invalid_argument("tile_annotations: min_area_kept outside [0, 1]");
  }
  const int pw = std::min(spec.patch_w, image_w);
  const int ph = std::min(spec.patch_h, image_h);
  const std::vector<int> xs = grid_origins(image_w, spec.patch_w, spec.stride);
  const std::vector<int> ys = grid_origins(image_h, spec.patch_h, spec.stride);

  std::vector<TilePatch> patches;
  for (int oy : ys) {
    for (int ox : xs) {
      TilePatch patch;
      patch.x = ox;
      patch.y = oy;
      patch.w = pw;
      patch.h = ph;
      patch.record.image_id = record.image_id + "__" + std::to_string(ox) +
                              "_" + std::to_string(oy);
      const double x0 = ox;
      const double y0 = oy;
      const double x1 = ox + pw;
      const double y1 = oy + ph;
      const ConvexPolygon rect{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
      for (const Instance& inst : record.instances) {
        const std::vector<Vec2> poly = instance_polygon(inst);
        bool fully_inside = true;
        for (const Vec2& v : poly) {
          if (v.x < x0 || v.x > x1 || v.y < y0 || v.y > y1) {
            fully_inside = false;
            break;
          }
        }
        Instance kept = inst;
        if (fully_inside) {
          kept.box.cx -= ox;
          kept.box.cy -= oy;
          if (kept.quad) {
            for (Vec2& v : kept.quad->vertices) {
              v.x -= ox;
              v.y -= oy;
            }
          }
        } else {
          const ConvexPolygon clipped = clip_convex(ConvexPolygon{poly}, rect);
          const double area = clipped.area();
          if (area <= 0.0 || area < spec.min_area_kept * polygon_area(poly)) {
            continue;
          }
          OrientedBox refit;
          try {
            refit = min_area_rect(clipped.vertices);
          } catch (const std::exception&) {
            continue;  // clipped to a sliver below the degeneracy floor
          }
          refit.cx -= ox;
          refit.cy -= oy;
          kept.box = refit;
          kept.quad.reset();
        }
        patch.record.instances.push_back(std::move(kept));
      }
      patches.push_back(std::move(patch));
    }
  }
  return patches;
}

DatasetStats dataset_stats(const std::vector<AnnotationRecord>& records) {
  DatasetStats s;
  s.width_bins.assign(8, 0);
  s.height_bins.assign(8, 0);
  s.angle_bins.assign(kAngleBins, 0);
  s.images = records.size();
  const auto size_bin = [](double v) {
    std::size_t b = 0;
    while (b < 7 && v >= kSizeBinEdges[b]) {
      ++b;
    }
    return b;
  };
  for (const AnnotationRecord& rec : records) {
    for (const Instance& inst : rec.instances) {
      ++s.instances;
      s.difficult += inst.difficult;
      ++s.per_class[inst.cls];
      ++s.width_bins[size_bin(inst.box.w)];
      ++s.height_bins[size_bin(inst.box.h)];
      const double theta = normalize_angle(inst.box.theta, AngleMode::Detection);
      auto bin = static_cast<std::size_t>((theta + kPi / 4.0) / kPi * kAngleBins);
      s.angle_bins[std::min(bin, kAngleBins - 1)] += 1;
    }
  }
  if (s.images > 0) {
    s.mean_per_image =
        static_cast<double>(s.instances) / static_cast<double>(s.images);
  }
  return s;
}

std::string to_text(const DatasetStats& stats) {
  std::ostringstream os;
  os << "images " << stats.images << '\n';
  os << "instances " << stats.instances << '\n';
  os << "difficult " << stats.difficult << '\n';
  os << std::fixed << std::setprecision(6);
  os << "mean_per_image " << stats.mean_per_image << '\n';
  os << "classes " << stats.per_class.size() << '\n';
  for (const auto& [cls, count] : stats.per_class) {
    os << "class " << cls << ' ' << count << '\n';
  }
  const auto dump = [&os](const char* name, const std::vector<std::size_t>& bins) {
    os << name;
    for (std::size_t b : bins) {
      os << ' ' << b;
    }
    os << '\n';
  };
  dump("width_bins", stats.width_bins);
  dump("height_bins", stats.height_bins);
  dump("angle_bins", stats.angle_bins);
  return os.str();
}

std::vector<DetFileEntry> parse_detection_file(const std::string& text) {
  std::vector<DetFileEntry> out;
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (blank(line) || trim(line)[0] == '#') {
      continue;
    }
    const std::vector<std::string> tok = split_ws(line);
    if (tok.size() != 8) {
      throw ParseError(line_no, "expected image_id class score cx cy w h theta, "
                                "got " +
                                    std::to_string(tok.size()) + " fields");
    }
    DetFileEntry e;
    e.image_id = tok[0];
    e.cls = tok[1];
    e.score = parse_real(tok[2], line_no);
    const double cx = parse_real(tok[3], line_no);
    const double cy = parse_real(tok[4], line_no);
    const double w = parse_real(tok[5], line_no);
    const double h = parse_real(tok[6], line_no);
    const double theta = parse_real(tok[7], line_no);
    if (w <= 0.0 || h <= 0.0) {
      throw ParseError(line_no, "non-positive box side");
    }
    try {
      e.box = canonicalize(OrientedBox{cx, cy, w, h, theta});
    } catch (const std::exception& ex) {
      throw ParseError(line_no, std::string("bad box: ") + ex.what());
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::string write_detection_file(const std::vector<DetFileEntry>& entries) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6);
  for (const DetFileEntry& e : entries) {
    os << e.image_id << ' ' << e.cls << ' ' << e.score << ' ';
    write_box_fields(os, e.box);
    os << '\n';
  }
  return os.str();
}

}  // namespace rotdet
