#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotdet/obb.hpp"

namespace rotdet {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Instance {
  OrientedBox box;
  std::optional<QuadBox> quad;  // original corners when parsed from a quad file
  std::string cls;
  bool difficult = false;
  // Full-turn direction in [0, 2*pi) as given in the file; only filled when
  // parsing in Orientation mode. Survives canonicalization and tiling.
  std::optional<double> head_angle;
};

struct AnnotationRecord {
  std::string image_id;
  std::vector<Instance> instances;
};

// One instance per line: x1 y1 x2 y2 x3 y3 x4 y4 class [difficult]. Quads are
// reordered counter-clockwise and fitted with their min-area rectangle.
AnnotationRecord parse_quad_file(const std::string& text,
                                 const std::string& image_id = "unknown");

// One instance per line: cx cy w h theta class [difficult]. Lines starting
// with '#' are header/comment lines; '# image=<id>' overrides image_id.
// Angles are radians unless degrees is set; values beyond a full turn are
// wrapped with a warning. Boxes are canonicalized under `mode`.
AnnotationRecord parse_theta_file(const std::string& text,
                                  AngleMode mode = AngleMode::Detection,
                                  const std::string& image_id = "unknown",
                                  bool degrees = false,
                                  std::vector<std::string>* warnings = nullptr);

// Canonical theta-format serialization: three header lines (format version,
// image id, field list) then one 6-decimal line per instance.
std::string write_canonical(const AnnotationRecord& record);

// Quad-format serialization of the stored corners (original quad if present,
// otherwise the box corners), 6 decimals.
std::string write_quad(const AnnotationRecord& record);

struct TilingSpec {
  int patch_w = 1024;
  int patch_h = 1024;
  int stride = 824;
  double min_area_kept = 0.5;
};

struct TilePatch {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  AnnotationRecord record;  // instance coordinates relative to (x, y)
};

// Regular grid with the given stride, last row/column shifted inward so every
// patch stays inside the image; an image smaller than the patch yields one
// clipped patch. An instance is kept in a patch iff its polygon clipped to the
// patch retains at least min_area_kept of its area; partially clipped
// instances are re-fitted with the min-area rectangle of the clipped polygon.
std::vector<TilePatch> tile_annotations(const AnnotationRecord& record,
                                        int image_w, int image_h,
                                        const TilingSpec& spec = {});

inline constexpr std::size_t kAngleBins = 18;  // 10 degrees over [-pi/4, 3pi/4)
// Long/short side histogram edges in pixels; first bin is < edge[0], last is
// >= edge[6].
inline constexpr double kSizeBinEdges[7] = {8, 16, 32, 64, 128, 256, 512};

struct DatasetStats {
  std::size_t images = 0;
  std::size_t instances = 0;
  std::size_t difficult = 0;
  double mean_per_image = 0.0;
  std::map<std::string, std::size_t> per_class;
  std::vector<std::size_t> width_bins;   // 8 bins over kSizeBinEdges
  std::vector<std::size_t> height_bins;  // 8 bins over kSizeBinEdges
  std::vector<std::size_t> angle_bins;   // kAngleBins over the detection range
};

DatasetStats dataset_stats(const std::vector<AnnotationRecord>& records);
std::string to_text(const DatasetStats& stats);

// Detection interchange line: image_id class score cx cy w h theta.
struct DetFileEntry {
  std::string image_id;
  std::string cls;
  double score = 0.0;
  OrientedBox box;
};

std::vector<DetFileEntry> parse_detection_file(const std::string& text);
std::string write_detection_file(const std::vector<DetFileEntry>& entries);

}  // namespace rotdet
