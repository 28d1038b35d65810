#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "warcal/dataset.hpp"
#include "warcal/kernel.hpp"

namespace warcal {

// Kernel-expansion classifier f(q) = sum_i alpha_i K(x_i, q), as produced
// by the adaptation solvers and the RLS baselines. A model with an empty
// coefficient vector is the degenerate constant classifier (decision value
// 0 everywhere, i.e. every query labeled NonTarget).
struct KernelModel {
  Eigen::VectorXd alpha;
  Eigen::MatrixXd train_x;
  KernelSpec spec;  // always bandwidth-resolved
  double train_accuracy = 0.0;

  // Diagnostics from the offline pseudo-label loop.
  int pseudo_rounds = 0;
  bool pseudo_stable = true;
};

struct PredictResult {
  Eigen::VectorXd values;
  std::vector<Label> labels;  // value > 0 -> Target, else NonTarget
};

PredictResult predict(const KernelModel& model, const Eigen::MatrixXd& queries);

// Anything that can assign labels to feature rows (typically a previously
// fitted classifier used to seed pseudo-labels).
using Labeler = std::function<std::vector<Label>(const Eigen::MatrixXd&)>;

// Weighted kernel regularized least squares on labeled rows only:
// alpha = (W K + sigma I)^-1 W y with W = diag(weights).
KernelModel weighted_rls(const Eigen::MatrixXd& x, const std::vector<Label>& y,
                         const Eigen::VectorXd& weights, double sigma,
                         const KernelSpec& spec,
                         bool balanced_accuracy = false);

namespace detail {

// Dense LU solve with one iterative-refinement pass. Throws SingularSystem
// when the returned vector does not actually satisfy the system.
Eigen::VectorXd solve_linear(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

// Fraction of decision values whose thresholded label matches the truth;
// balanced variant averages the per-class accuracies (falls back to the
// raw fraction if a class is absent).
double labeled_accuracy(const Eigen::VectorXd& values,
                        const std::vector<Label>& truth, bool balanced);

}  // namespace detail

}  // namespace warcal
