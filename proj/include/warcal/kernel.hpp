#pragma once

#include <Eigen/Dense>

namespace warcal {

enum class KernelKind { Linear, Rbf };
enum class BandwidthMode { Fixed, MedianHeuristic };

struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  // RBF entry is exp(-gamma * |x - x'|^2); ignored for Linear.
  double gamma = 1.0;
  BandwidthMode bandwidth = BandwidthMode::MedianHeuristic;
};

// gamma = 1 / (2 * median^2) where median is taken over all pairwise
// Euclidean distances of the rows of x. Throws DegenerateData when every
// row is identical.
double median_heuristic_gamma(const Eigen::MatrixXd& x);

// Pins a MedianHeuristic RBF spec to a concrete gamma computed on x.
// Fixed and Linear specs pass through unchanged.
KernelSpec resolve_bandwidth(const KernelSpec& spec, const Eigen::MatrixXd& x);

// N x N Gram matrix of the rows of x. A MedianHeuristic spec is resolved
// on x itself. The result is exactly symmetric; the RBF diagonal is 1.
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& x, const KernelSpec& spec);

// Vector of K(x_i, q) for a single query point. The spec must already be
// resolved so that the value agrees with the Gram matrix of the training
// rows.
Eigen::VectorXd kernel_row(const Eigen::MatrixXd& x, const Eigen::VectorXd& q,
                           const KernelSpec& spec);

// q x N matrix with entry (j, i) = K(x_i, q_j). Resolved spec required.
Eigen::MatrixXd kernel_cross(const Eigen::MatrixXd& x,
                             const Eigen::MatrixXd& queries,
                             const KernelSpec& spec);

}  // namespace warcal
