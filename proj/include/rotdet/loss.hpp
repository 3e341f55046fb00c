#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "rotdet/coding.hpp"

namespace rotdet {

struct LossConfig {
  double lambda = 1.0;  // regression trade-off
  double focal_alpha = 0.25;
  double focal_gamma = 2.0;
  double smooth_l1_beta = 1.0;
};

// Probabilities are clamped to [kProbEps, 1 - kProbEps] before taking logs.
inline constexpr double kProbEps = 1e-7;

// label 1: -alpha * (1-p)^gamma * log(p)
// label 0: -(1-alpha) * p^gamma * log(1-p)
double focal_loss(double p, int label, double alpha = 0.25, double gamma = 2.0);
double focal_loss_grad(double p, int label, double alpha = 0.25,
                       double gamma = 2.0);

// Huber-style: 0.5*d^2/beta inside |d| < beta, |d| - 0.5*beta outside.
double smooth_l1(double pred, double target, double beta = 1.0);
double smooth_l1_grad(double pred, double target, double beta = 1.0);

// One stage of per-anchor training targets. Classification runs over all
// entries; regression runs over entries with label 1 only (offsets of other
// entries are ignored). n_cls/n_reg are the normalizers and must equal the
// entry count and the positive count.
struct StageBatch {
  std::vector<double> probs;
  std::vector<int> labels;  // 0 or 1
  std::vector<BoxOffsets> pred;
  std::vector<BoxOffsets> target;
  std::size_t n_cls = 0;
  std::size_t n_reg = 0;
};

StageBatch make_stage_batch(std::vector<double> probs, std::vector<int> labels,
                            std::vector<BoxOffsets> pred,
                            std::vector<BoxOffsets> target);

// Sum over both stages of (1/n_cls) * sum(focal) + lambda * (1/n_reg) *
// sum over positives of the five-component smooth L1. A stage with n_reg = 0
// contributes no regression term; n_cls = 0 is an error.
double total_loss(const StageBatch& stage1, const StageBatch& stage2,
                  const LossConfig& config = {});

// Max relative error between the analytic gradient and a central difference
// of f at x. Relative to max(1, |analytic|).
double finite_diff_check(const std::function<double(double)>& f, double x,
                         double analytic, double epsilon = 1e-6);

}  // namespace rotdet
