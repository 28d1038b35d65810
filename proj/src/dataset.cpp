#include "warcal/dataset.hpp"

#include <algorithm>

#include "warcal/errors.hpp"

namespace warcal {

int SourceDomain::count(Label c) const {
  return static_cast<int>(std::count(y.begin(), y.end(), c));
}

int TargetState::labeled_count(Label c) const {
  return static_cast<int>(std::count(y_labeled.begin(), y_labeled.end(), c));
}

Eigen::VectorXd source_sample_weights(const SourceDomain& domain) {
  const int n = static_cast<int>(domain.y.size());
  if (domain.x.rows() != n)
    throw DimensionMismatch("source rows and labels disagree");
  const int n1 = domain.count(Label::Target);
  if (n1 == 0 || n1 == n)
    throw MissingClassError("source domain '" + domain.id +
                            "' contains a single class");
  const double w2 = static_cast<double>(n1) / static_cast<double>(n - n1);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i)
    w[i] = domain.y[i] == Label::Target ? 1.0 : w2;
  return w;
}

Eigen::VectorXd target_sample_weights(const TargetState& target) {
  const int m_l = static_cast<int>(target.y_labeled.size());
  if (m_l < 1) throw InvalidInput("no labeled target samples");
  if (target.x_labeled.rows() != m_l)
    throw DimensionMismatch("labeled target rows and labels disagree");
  const int m1 = target.labeled_count(Label::Target);
  // One labeled class: no imbalance correction is definable yet.
  if (m1 == 0 || m1 == m_l) return Eigen::VectorXd::Ones(m_l);
  const double w2 = static_cast<double>(m1) / static_cast<double>(m_l - m1);
  Eigen::VectorXd w(m_l);
  for (int i = 0; i < m_l; ++i)
    w[i] = target.y_labeled[i] == Label::Target ? 1.0 : w2;
  return w;
}

Eigen::VectorXd loss_weight_diagonal(const WeightAssignment& weights, int n,
                                     int m_l, int m_u) {
  if (n < 0 || m_l < 0 || m_u < 0) throw InvalidInput("negative sample count");
  if (weights.source.size() != n || weights.target.size() != m_l)
    throw DimensionMismatch("weight lengths do not match sample counts");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n + m_l + m_u);
  e.head(n) = weights.source;
  e.segment(n, m_l) = weights.target_overall * weights.target;
  return e;
}

}  // namespace warcal
