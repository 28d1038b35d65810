#include "warcal/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "warcal/errors.hpp"

namespace warcal {

double median_heuristic_gamma(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw InvalidInput("median heuristic needs at least two rows");
  if (!x.allFinite()) throw NonFiniteInput("non-finite feature values");
  const Eigen::VectorXd sq = x.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * (x * x.transpose());
  d2.colwise() += sq;
  d2.rowwise() += sq.transpose();
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      dist.push_back(std::sqrt(std::max(0.0, d2(i, j))));
  std::sort(dist.begin(), dist.end());
  const std::size_t count = dist.size();
  double med = count % 2 == 1
                   ? dist[count / 2]
                   : 0.5 * (dist[count / 2 - 1] + dist[count / 2]);
  if (med <= 0.0) {
    // Duplicated rows can swamp the median; fall back to the positive
    // distances before declaring the data degenerate.
    auto first_pos = std::upper_bound(dist.begin(), dist.end(), 0.0);
    if (first_pos == dist.end())
      throw DegenerateData("all rows identical; no bandwidth derivable");
    const std::size_t remain = static_cast<std::size_t>(dist.end() - first_pos);
    med = remain % 2 == 1 ? first_pos[remain / 2]
                          : 0.5 * (first_pos[remain / 2 - 1] + first_pos[remain / 2]);
  }
  return 1.0 / (2.0 * med * med);
}

KernelSpec resolve_bandwidth(const KernelSpec& spec, const Eigen::MatrixXd& x) {
  KernelSpec out = spec;
  if (out.kind == KernelKind::Rbf) {
    if (out.bandwidth == BandwidthMode::MedianHeuristic) {
      out.gamma = median_heuristic_gamma(x);
      out.bandwidth = BandwidthMode::Fixed;
    }
    if (!(out.gamma > 0.0)) throw InvalidInput("rbf gamma must be positive");
  }
  return out;
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& x, const KernelSpec& spec0) {
  if (x.rows() < 1) throw InvalidInput("empty sample matrix");
  if (!x.allFinite()) throw NonFiniteInput("non-finite feature values");
  Eigen::MatrixXd k;
  if (spec0.kind == KernelKind::Linear) {
    k.noalias() = x * x.transpose();
  } else {
    const KernelSpec spec = resolve_bandwidth(spec0, x);
    const Eigen::VectorXd sq = x.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = -2.0 * (x * x.transpose());
    d2.colwise() += sq;
    d2.rowwise() += sq.transpose();
    d2 = d2.cwiseMax(0.0);
    k = (-spec.gamma * d2.array()).exp();
    k.diagonal().setOnes();
  }
  // Exact elementwise symmetry regardless of GEMM blocking.
  k = Eigen::MatrixXd(k.selfadjointView<Eigen::Lower>());
  return k;
}

Eigen::VectorXd kernel_row(const Eigen::MatrixXd& x, const Eigen::VectorXd& q,
                           const KernelSpec& spec) {
  if (x.cols() != q.size())
    throw DimensionMismatch("query dimension does not match training rows");
  if (spec.kind == KernelKind::Linear) return x * q;
  if (spec.bandwidth != BandwidthMode::Fixed)
    throw InvalidInput("kernel_row requires a resolved bandwidth");
  Eigen::VectorXd d2 =
      (x.rowwise() - q.transpose()).rowwise().squaredNorm();
  return (-spec.gamma * d2.array()).exp();
}

Eigen::MatrixXd kernel_cross(const Eigen::MatrixXd& x,
                             const Eigen::MatrixXd& queries,
                             const KernelSpec& spec) {
  if (x.cols() != queries.cols())
    throw DimensionMismatch("query dimension does not match training rows");
  if (spec.kind == KernelKind::Linear) return queries * x.transpose();
  if (spec.bandwidth != BandwidthMode::Fixed)
    throw InvalidInput("kernel_cross requires a resolved bandwidth");
  const Eigen::VectorXd sq_x = x.rowwise().squaredNorm();
  const Eigen::VectorXd sq_q = queries.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * (queries * x.transpose());
  d2.colwise() += sq_q;
  d2.rowwise() += sq_x.transpose();
  d2 = d2.cwiseMax(0.0);
  return (-spec.gamma * d2.array()).exp();
}

}  // namespace warcal
