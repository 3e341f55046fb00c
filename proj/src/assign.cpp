#include "rotdet/assign.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rotdet/geometry.hpp"

namespace rotdet {

AnchorGridSpec AnchorGridSpec::retina_default() {
  AnchorGridSpec spec;
  spec.levels = {{8, 32.0}, {16, 64.0}, {32, 128.0}, {64, 256.0}, {128, 512.0}};
  return spec;
}

AnchorSet generate_anchors(const AnchorGridSpec& spec, int image_w, int image_h) {
  if (image_w < 1 || image_h < 1) {
    throw std::invalid_argument("generate_anchors: image size must be positive");
  }
  if (spec.levels.empty() || spec.angles.empty()) {
    throw std::invalid_argument("generate_anchors: empty levels or angles");
  }
  AnchorSet set;
  for (std::size_t li = 0; li < spec.levels.size(); ++li) {
    const PyramidLevel& lvl = spec.levels[li];
    if (lvl.stride < 1 || !(lvl.base_size > 0.0)) {
      throw std::invalid_argument("generate_anchors: bad level");
    }
    const int rows = (image_h + lvl.stride - 1) / lvl.stride;
    const int cols = (image_w + lvl.stride - 1) / lvl.stride;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double cx = (c + 0.5) * lvl.stride;
        const double cy = (r + 0.5) * lvl.stride;
        for (double angle : spec.angles) {
          set.anchors.push_back(
              make_box(cx, cy, lvl.base_size, lvl.base_size, angle));
          set.level_of.push_back(static_cast<int>(li));
        }
      }
    }
  }
  return set;
}

AssignmentResult max_iou_assign(const std::vector<OrientedBox>& anchors,
                                const std::vector<OrientedBox>& gts,
                                const AssignerConfig& config) {
  if (!(config.pos_iou >= config.neg_iou)) {
    throw std::invalid_argument("max_iou_assign: pos_iou below neg_iou");
  }
  AssignmentResult res;
  res.labels.assign(anchors.size(), kNegative);
  res.matched_iou.assign(anchors.size(), 0.0);
  if (anchors.empty() || gts.empty()) {
    return res;
  }
  const IoUMatrix m = iou_matrix(anchors, gts);
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    std::size_t best_g = 0;
    double best = m.at(i, 0);
    for (std::size_t g = 1; g < gts.size(); ++g) {
      if (m.at(i, g) > best) {
        best = m.at(i, g);
        best_g = g;
      }
    }
    res.matched_iou[i] = best;
    if (best >= config.pos_iou) {
      res.labels[i] = static_cast<int>(best_g);
    } else if (best >= config.neg_iou) {
      res.labels[i] = kIgnore;
    }
  }
  if (config.force_match) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      std::size_t best_i = 0;
      double best = m.at(0, g);
      for (std::size_t i = 1; i < anchors.size(); ++i) {
        if (m.at(i, g) > best) {
          best = m.at(i, g);
          best_i = i;
        }
      }
      if (best > 0.0) {
        res.labels[best_i] = static_cast<int>(g);
        res.matched_iou[best_i] = best;
      }
    }
  }
  return res;
}

AssignmentResult atss_assign(const AnchorSet& anchors,
                             const std::vector<OrientedBox>& gts,
                             const AssignerConfig& config) {
  const std::size_t n = anchors.anchors.size();
  if (anchors.level_of.size() != n) {
    throw std::invalid_argument("atss_assign: anchors/level_of length mismatch");
  }
  if (config.topk < 1) {
    throw std::invalid_argument("atss_assign: topk must be >= 1");
  }
  AssignmentResult res;
  res.labels.assign(n, kNegative);
  res.matched_iou.assign(n, 0.0);
  if (n == 0 || gts.empty()) {
    return res;
  }

  int num_levels = 0;
  for (int lvl : anchors.level_of) {
    num_levels = std::max(num_levels, lvl + 1);
  }
  std::vector<std::vector<std::size_t>> by_level(num_levels);
  for (std::size_t i = 0; i < n; ++i) {
    by_level[anchors.level_of[i]].push_back(i);
  }

  const IoUMatrix m = iou_matrix(anchors.anchors, gts);
  std::vector<double> best_iou(n, -1.0);
  std::vector<std::pair<double, std::size_t>> ranked;

  for (std::size_t g = 0; g < gts.size(); ++g) {
    const Vec2 gc = gts[g].center();
    std::vector<std::size_t> candidates;
    for (const std::vector<std::size_t>& level : by_level) {
      ranked.clear();
      ranked.reserve(level.size());
      for (std::size_t i : level) {
        const Vec2 d = anchors.anchors[i].center() - gc;
        ranked.emplace_back(dot(d, d), i);
      }
      const std::size_t take = std::min<std::size_t>(config.topk, ranked.size());
      std::partial_sort(ranked.begin(), ranked.begin() + take, ranked.end());
      for (std::size_t k = 0; k < take; ++k) {
        candidates.push_back(ranked[k].second);
      }
    }
    if (candidates.empty()) {
      continue;
    }
    double mean = 0.0;
    for (std::size_t i : candidates) {
      mean += m.at(i, g);
    }
    mean /= static_cast<double>(candidates.size());
    double var = 0.0;
    for (std::size_t i : candidates) {
      const double d = m.at(i, g) - mean;
      var += d * d;
    }
    // Population variance: a single candidate yields stddev 0, so the gt can
    // still match its only nearby anchor.
    var /= static_cast<double>(candidates.size());
    const double threshold = mean + std::sqrt(var);
    for (std::size_t i : candidates) {
      const double iou = m.at(i, g);
      if (iou < threshold || !contains_point(gts[g], anchors.anchors[i].center())) {
        continue;
      }
      if (iou > best_iou[i]) {
        best_iou[i] = iou;
        res.labels[i] = static_cast<int>(g);
        res.matched_iou[i] = iou;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (res.labels[i] < 0) {
      double best = 0.0;
      for (std::size_t g = 0; g < gts.size(); ++g) {
        best = std::max(best, m.at(i, g));
      }
      res.matched_iou[i] = best;
    }
  }
  return res;
}

RefinerFn synthetic_refiner(double noise_sigma, std::uint64_t seed, AngleMode mode) {
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) {
    throw std::invalid_argument("synthetic_refiner: bad sigma");
  }
  return [noise_sigma, seed, mode](const std::vector<OrientedBox>& anchors,
                                   const AssignmentResult& stage1,
                                   const std::vector<OrientedBox>& gts) {
    if (stage1.labels.size() != anchors.size()) {
      throw std::invalid_argument("synthetic_refiner: assignment size mismatch");
    }
    std::mt19937_64 rng(seed);
    const auto unit = [&rng] {
      return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    const auto gauss = [&] {
      const double u1 = 1.0 - unit();  // (0, 1], keeps log finite
      const double u2 = unit();
      return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    };
    std::vector<BoxOffsets> out(anchors.size());
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      const int label = stage1.labels[i];
      if (label < 0) {
        continue;
      }
      if (static_cast<std::size_t>(label) >= gts.size()) {
        throw std::invalid_argument("synthetic_refiner: label out of range");
      }
      BoxOffsets t = encode(gts[label], anchors[i], mode);
      if (noise_sigma > 0.0) {
        t.tx += noise_sigma * gauss();
        t.ty += noise_sigma * gauss();
        t.tw += noise_sigma * gauss();
        t.th += noise_sigma * gauss();
        t.ttheta += noise_sigma * (kPi / 8.0) * gauss();
      }
      out[i] = t;
    }
    return out;
  };
}

TS4Result ts4_assign(const AnchorSet& anchors, const std::vector<OrientedBox>& gts,
                     const RefinerFn& refiner, const TS4Config& config) {
  if (!refiner) {
    throw std::invalid_argument("ts4_assign: null refiner");
  }
  TS4Result out;
  out.stage1 = atss_assign(anchors, gts, config.stage1);
  const std::vector<BoxOffsets> offsets = refiner(anchors.anchors, out.stage1, gts);
  if (offsets.size() != anchors.anchors.size()) {
    throw std::invalid_argument("ts4_assign: refiner output length mismatch");
  }
  out.refined = refine_anchors(anchors.anchors, offsets, config.mode);
  out.stage2 = max_iou_assign(out.refined, gts, config.stage2);
  return out;
}

AssignmentStats summarize(const AssignmentResult& result, std::size_t num_gts) {
  if (result.labels.size() != result.matched_iou.size()) {
    throw std::invalid_argument("summarize: malformed assignment");
  }
  AssignmentStats s;
  s.anchors = result.labels.size();
  s.gts = num_gts;
  std::vector<char> seen(num_gts, 0);
  double sum = 0.0;
  double lo = 1.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < result.labels.size(); ++i) {
    const int label = result.labels[i];
    if (label >= 0) {
      ++s.positives;
      const double iou = result.matched_iou[i];
      sum += iou;
      lo = std::min(lo, iou);
      hi = std::max(hi, iou);
      if (static_cast<std::size_t>(label) < num_gts) {
        seen[label] = 1;
      }
    } else if (label == kIgnore) {
      ++s.ignored;
    } else {
      ++s.negatives;
    }
  }
  if (s.positives > 0) {
    s.mean_pos_iou = sum / static_cast<double>(s.positives);
    s.min_pos_iou = lo;
    s.max_pos_iou = hi;
  }
  for (char c : seen) {
    s.matched_gts += c != 0;
  }
  return s;
}

std::string to_text(const AssignmentStats& stats) {
  std::ostringstream os;
  os << "anchors " << stats.anchors << '\n'
     << "gts " << stats.gts << '\n'
     << "positives " << stats.positives << '\n'
     << "negatives " << stats.negatives << '\n'
     << "ignored " << stats.ignored << '\n'
     << "matched_gts " << stats.matched_gts << '\n'
     << std::fixed << std::setprecision(6)
     << "mean_pos_iou " << stats.mean_pos_iou << '\n'
     << "min_pos_iou " << stats.min_pos_iou << '\n'
     << "max_pos_iou " << stats.max_pos_iou << '\n';
  return os.str();
}

}  // namespace rotdet
