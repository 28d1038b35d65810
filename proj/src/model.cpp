#include "warcal/model.hpp"

#include <Eigen/LU>
#include <cmath>

#include "warcal/errors.hpp"

namespace warcal {

namespace detail {

Eigen::VectorXd solve_linear(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw DimensionMismatch("system matrix and right-hand side disagree");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd x = lu.solve(b);
  x += lu.solve(b - a * x);  // one refinement pass
  const double resid = (a * x - b).norm();
  const double scale =
      a.cwiseAbs().rowwise().sum().maxCoeff() * x.norm() + b.norm();
  if (!x.allFinite() || resid > 1e-7 * scale + 1e-280)
    throw SingularSystem("linear system is numerically singular");
  return x;
}

double labeled_accuracy(const Eigen::VectorXd& values,
                        const std::vector<Label>& truth, bool balanced) {
  const int n = static_cast<int>(truth.size());
  if (values.size() != n)
    throw DimensionMismatch("decision values and labels disagree");
  if (n == 0) return 0.0;
  int hit[2] = {0, 0};
  int total[2] = {0, 0};
  for (int i = 0; i < n; ++i) {
    const int c = truth[i] == Label::Target ? 0 : 1;
    ++total[c];
    if (label_from_value(values[i]) == truth[i]) ++hit[c];
  }
  if (balanced && total[0] > 0 && total[1] > 0)
    return 0.5 * (static_cast<double>(hit[0]) / total[0] +
                  static_cast<double>(hit[1]) / total[1]);
  return static_cast<double>(hit[0] + hit[1]) / n;
}

}  // namespace detail

PredictResult predict(const KernelModel& model, const Eigen::MatrixXd& queries) {
  PredictResult out;
  if (model.alpha.size() == 0) {
    out.values = Eigen::VectorXd::Zero(queries.rows());
  } else {
    if (model.alpha.size() != model.train_x.rows())
      throw DimensionMismatch("coefficients do not match training rows");
    out.values = kernel_cross(model.train_x, queries, model.spec) * model.alpha;
  }
  out.labels.reserve(static_cast<std::size_t>(out.values.size()));
  for (Eigen::Index i = 0; i < out.values.size(); ++i)
    out.labels.push_back(label_from_value(out.values[i]));
  return out;
}

KernelModel weighted_rls(const Eigen::MatrixXd& x, const std::vector<Label>& y,
                         const Eigen::VectorXd& weights, double sigma,
                         const KernelSpec& spec, bool balanced_accuracy) {
  const int n = static_cast<int>(y.size());
  if (x.rows() != n || weights.size() != n)
    throw DimensionMismatch("rows, labels and weights disagree");
  if (n < 1) throw InvalidInput("no training samples");
  KernelModel model;
  model.spec = resolve_bandwidth(spec, x);
  model.train_x = x;
  const Eigen::MatrixXd k = gram_matrix(x, model.spec);
  Eigen::MatrixXd a = weights.asDiagonal() * k;
  a.diagonal().array() += sigma;
  Eigen::VectorXd yv(n);
  for (int i = 0; i < n; ++i) yv[i] = label_value(y[i]);
  model.alpha = detail::solve_linear(a, weights.cwiseProduct(yv));
  model.train_accuracy =
      detail::labeled_accuracy(k * model.alpha, y, balanced_accuracy);
  return model;
}

}  // namespace warcal
