#include "rotdet/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rotdet {

namespace {

double clamp_prob(double p, const char* what) {
  if (!std::isfinite(p)) {
    throw std::invalid_argument(std::string(what) + ": non-finite probability");
  }
  if (p < 0.0 || p > 1.0) {
    throw std::domain_error(std::string(what) + ": probability outside [0, 1]");
  }
  return std::clamp(p, kProbEps, 1.0 - kProbEps);
}

void check_focal_params(int label, double alpha, double gamma, const char* what) {
  if (label != 0 && label != 1) {
    throw std::invalid_argument(std::string(what) + ": label must be 0 or 1");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument(std::string(what) + ": alpha outside (0, 1]");
  }
  if (!(gamma >= 0.0)) {
    throw std::invalid_argument(std::string(what) + ": gamma must be >= 0");
  }
}

void check_batch(const StageBatch& b, const char* what) {
  const std::size_t n = b.probs.size();
  if (b.labels.size() != n || b.pred.size() != n || b.target.size() != n) {
    throw std::invalid_argument(std::string(what) + ": ragged stage batch");
  }
  if (n == 0 || b.n_cls != n) {
    throw std::invalid_argument(std::string(what) + ": empty batch or bad n_cls");
  }
  std::size_t positives = 0;
  for (int label : b.labels) {
    if (label != 0 && label != 1) {
      throw std::invalid_argument(std::string(what) + ": label must be 0 or 1");
    }
    positives += label;
  }
  if (b.n_reg != positives) {
    throw std::invalid_argument(std::string(what) + ": n_reg mismatch");
  }
}

}  // namespace

double focal_loss(double p, int label, double alpha, double gamma) {
  check_focal_params(label, alpha, gamma, "focal_loss");
  p = clamp_prob(p, "focal_loss");
  if (label == 1) {
    return -alpha * std::pow(1.0 - p, gamma) * std::log(p);
  }
  return -(1.0 - alpha) * std::pow(p, gamma) * std::log(1.0 - p);
}

double focal_loss_grad(double p, int label, double alpha, double gamma) {
  check_focal_params(label, alpha, gamma, "focal_loss_grad");
  p = clamp_prob(p, "focal_loss_grad");
  if (label == 1) {
    const double modulator = gamma == 0.0
                                 ? 0.0
                                 : gamma * std::pow(1.0 - p, gamma - 1.0) * std::log(p);
    return alpha * (modulator - std::pow(1.0 - p, gamma) / p);
  }
  const double modulator = gamma == 0.0
                               ? 0.0
                               : gamma * std::pow(p, gamma - 1.0) * std::log(1.0 - p);
  return (1.0 - alpha) * (-modulator + std::pow(p, gamma) / (1.0 - p));
}

double smooth_l1(double pred, double target, double beta) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("smooth_l1: beta must be > 0");
  }
  if (!std::isfinite(pred) || !std::isfinite(target)) {
    throw std::invalid_argument("smooth_l1: non-finite input");
  }
  const double d = pred - target;
  const double ad = std::abs(d);
  return ad < beta ? 0.5 * d * d / beta : ad - 0.5 * beta;
}

double smooth_l1_grad(double pred, double target, double beta) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("smooth_l1_grad: beta must be > 0");
  }
  if (!std::isfinite(pred) || !std::isfinite(target)) {
    throw std::invalid_argument("smooth_l1_grad: non-finite input");
  }
  const double d = pred - target;
  return std::abs(d) < beta ? d / beta : (d > 0.0 ? 1.0 : -1.0);
}

StageBatch make_stage_batch(std::vector<double> probs, std::vector<int> labels,
                            std::vector<BoxOffsets> pred,
                            std::vector<BoxOffsets> target) {
  StageBatch b;
  b.probs = std::move(probs);
  b.labels = std::move(labels);
  b.pred = std::move(pred);
  b.target = std::move(target);
  b.n_cls = b.probs.size();
  b.n_reg = 0;
  for (int label : b.labels) {
    b.n_reg += label == 1;
  }
  check_batch(b, "make_stage_batch");
  return b;
}

namespace {

double stage_loss(const StageBatch& b, const LossConfig& cfg) {
  double cls = 0.0;
  for (std::size_t i = 0; i < b.probs.size(); ++i) {
    cls += focal_loss(b.probs[i], b.labels[i], cfg.focal_alpha, cfg.focal_gamma);
  }
  cls /= static_cast<double>(b.n_cls);
  if (b.n_reg == 0) {
    return cls;
  }
  double reg = 0.0;
  for (std::size_t i = 0; i < b.probs.size(); ++i) {
    if (b.labels[i] != 1) {
      continue;
    }
    const BoxOffsets& p = b.pred[i];
    const BoxOffsets& t = b.target[i];
    reg += smooth_l1(p.tx, t.tx, cfg.smooth_l1_beta) +
           smooth_l1(p.ty, t.ty, cfg.smooth_l1_beta) +
           smooth_l1(p.tw, t.tw, cfg.smooth_l1_beta) +
           smooth_l1(p.th, t.th, cfg.smooth_l1_beta) +
           smooth_l1(p.ttheta, t.ttheta, cfg.smooth_l1_beta);
  }
  return cls + cfg.lambda * reg / static_cast<double>(b.n_reg);
}

}  // namespace

double total_loss(const StageBatch& stage1, const StageBatch& stage2,
                  const LossConfig& config) {
  if (!(config.lambda > 0.0) || !(config.smooth_l1_beta > 0.0)) {
    throw std::invalid_argument("total_loss: bad config");
  }
  check_focal_params(0, config.focal_alpha, config.focal_gamma, "total_loss");
  check_batch(stage1, "total_loss");
  check_batch(stage2, "total_loss");
  return stage_loss(stage1, config) + stage_loss(stage2, config);
}

double finite_diff_check(const std::function<double(double)>& f, double x,
                         double analytic, double epsilon) {
  if (!f) {
    throw std::invalid_argument("finite_diff_check: null function");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("finite_diff_check: epsilon must be > 0");
  }
  const double numeric = (f(x + epsilon) - f(x - epsilon)) / (2.0 * epsilon);
  return std::abs(numeric - analytic) / std::max(1.0, std::abs(analytic));
}

}  // namespace rotdet
