#include "warcal/adapt_online.hpp"

#include "warcal/errors.hpp"

namespace warcal {

Eigen::MatrixXd marginal_mmd_matrix_online(int n, int m_l) {
  return marginal_mmd_matrix(n, m_l);
}

KernelModel fit_owar(const SourceDomain& source, const TargetState& target,
                     const WarHyperParams& params, const KernelSpec& spec) {
  if (target.x_unlabeled.rows() != 0)
    throw InvalidInput("online solver must not see an unlabeled pool");
  const int n = static_cast<int>(source.x.rows());
  const int m_l = static_cast<int>(target.x_labeled.rows());
  const int d = static_cast<int>(source.x.cols());
  if (static_cast<int>(source.y.size()) != n)
    throw DimensionMismatch("source rows and labels disagree");
  if (static_cast<int>(target.y_labeled.size()) != m_l)
    throw DimensionMismatch("labeled target rows and labels disagree");
  if (m_l > 0 && target.x_labeled.cols() != d)
    throw DimensionMismatch("feature dimensions disagree across domains");
  const int n1 = source.count(Label::Target);
  if (n1 == 0 || n1 == n)
    throw MissingClassError("source domain '" + source.id +
                            "' contains a single class");

  Eigen::MatrixXd x(n + m_l, d);
  x.topRows(n) = source.x;
  if (m_l > 0) x.bottomRows(m_l) = target.x_labeled;

  KernelModel model;
  model.spec = resolve_bandwidth(spec, x);
  model.train_x = std::move(x);
  const Eigen::MatrixXd k = gram_matrix(model.train_x, model.spec);

  WeightAssignment w;
  w.source = params.balance_classes ? source_sample_weights(source)
                                    : Eigen::VectorXd::Ones(n);
  w.target = m_l == 0 ? Eigen::VectorXd()
             : params.balance_classes ? target_sample_weights(target)
                                      : Eigen::VectorXd::Ones(m_l);
  w.target_overall = params.w_t;
  const Eigen::VectorXd e = loss_weight_diagonal(w, n, m_l, 0);

  // Both MMD terms vanish at m_l = 0: the factor helpers return empty
  // vectors, leaving plain weighted RLS on the source rows.
  const Eigen::VectorXd a_marginal = detail::marginal_mmd_factor(n, m_l);
  const auto b_cond =
      detail::conditional_mmd_factors(source.y, target.y_labeled, n, m_l);

  Eigen::VectorXd y(n + m_l);
  for (int i = 0; i < n; ++i) y[i] = label_value(source.y[i]);
  for (int i = 0; i < m_l; ++i) y[n + i] = label_value(target.y_labeled[i]);

  model.alpha = detail::solve_war_system(k, e, a_marginal, b_cond, y, params);
  std::vector<Label> labeled_y = source.y;
  labeled_y.insert(labeled_y.end(), target.y_labeled.begin(),
                   target.y_labeled.end());
  model.train_accuracy = detail::labeled_accuracy(k * model.alpha, labeled_y,
                                                  params.bca_fusion_weights);
  return model;
}

}  // namespace warcal
