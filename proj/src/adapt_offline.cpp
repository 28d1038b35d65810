#include "warcal/adapt_offline.hpp"

#include <algorithm>

#include "warcal/errors.hpp"

namespace warcal {

namespace detail {

Eigen::VectorXd marginal_mmd_factor(int n, int m) {
  if (n < 1 || m < 1) return Eigen::VectorXd();
  Eigen::VectorXd a(n + m);
  a.head(n).setConstant(1.0 / n);
  a.tail(m).setConstant(-1.0 / m);
  return a;
}

std::array<Eigen::VectorXd, 2> conditional_mmd_factors(
    const std::vector<Label>& source_y, const std::vector<Label>& target_y,
    int n, int m_total) {
  if (static_cast<int>(source_y.size()) != n ||
      static_cast<int>(target_y.size()) != m_total)
    throw DimensionMismatch("label lengths do not match sample counts");
  std::array<Eigen::VectorXd, 2> factors;
  const Label classes[2] = {Label::Target, Label::NonTarget};
  for (int c = 0; c < 2; ++c) {
    const int n_c = static_cast<int>(
        std::count(source_y.begin(), source_y.end(), classes[c]));
    const int m_c = static_cast<int>(
        std::count(target_y.begin(), target_y.end(), classes[c]));
    if (n_c == 0)
      throw MissingClassError("source domain lacks a class required by the "
                              "conditional MMD term");
    if (m_c == 0) continue;  // no target evidence for this class yet
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + m_total);
    for (int i = 0; i < n; ++i)
      if (source_y[i] == classes[c]) b[i] = 1.0 / n_c;
    for (int j = 0; j < m_total; ++j)
      if (target_y[j] == classes[c]) b[n + j] = -1.0 / m_c;
    factors[c] = std::move(b);
  }
  return factors;
}

Eigen::VectorXd solve_war_system(const Eigen::MatrixXd& k,
                                 const Eigen::VectorXd& e,
                                 const Eigen::VectorXd& a_marginal,
                                 const std::array<Eigen::VectorXd, 2>& b_cond,
                                 const Eigen::VectorXd& y,
                                 const WarHyperParams& params) {
  const Eigen::Index n = k.rows();
  if (e.size() != n || y.size() != n)
    throw DimensionMismatch("system blocks disagree in size");
  Eigen::MatrixXd a = e.asDiagonal() * k;
  // (v v^T) K == v (K v)^T for symmetric K; assembling through the rank
  // factors keeps the build quadratic instead of cubic.
  if (a_marginal.size() > 0)
    a.noalias() += params.lambda_p * a_marginal * (k * a_marginal).transpose();
  for (const auto& b : b_cond)
    if (b.size() > 0)
      a.noalias() += params.lambda_q * b * (k * b).transpose();
  a.diagonal().array() += params.sigma;
  return detail::solve_linear(a, e.cwiseProduct(y));
}

}  // namespace detail

Eigen::MatrixXd marginal_mmd_matrix(int n, int m) {
  if (n < 1 || m < 1)
    throw EmptyBlock("marginal MMD needs samples on both sides");
  const Eigen::VectorXd a = detail::marginal_mmd_factor(n, m);
  return a * a.transpose();
}

Eigen::MatrixXd conditional_mmd_matrix(const SourceDomain& source,
                                       const TargetState& target) {
  const int n = static_cast<int>(source.y.size());
  const int m_l = static_cast<int>(target.y_labeled.size());
  const int m_u = static_cast<int>(target.x_unlabeled.rows());
  if (m_u > 0 && !target.pseudo_labels)
    throw MissingPseudoLabels("unlabeled pool has no pseudo-labels");
  if (m_u > 0 && static_cast<int>(target.pseudo_labels->size()) != m_u)
    throw DimensionMismatch("pseudo-labels do not cover the pool");
  std::vector<Label> target_y = target.y_labeled;
  if (m_u > 0)
    target_y.insert(target_y.end(), target.pseudo_labels->begin(),
                    target.pseudo_labels->end());
  const auto factors =
      detail::conditional_mmd_factors(source.y, target_y, n, m_l + m_u);
  const Eigen::Index dim = n + m_l + m_u;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& b : factors)
    if (b.size() > 0) m.noalias() += b * b.transpose();
  return m;
}

Eigen::VectorXd solve_alpha(const Eigen::MatrixXd& k, const Eigen::VectorXd& e,
                            const Eigen::MatrixXd& m0, const Eigen::MatrixXd& m,
                            const Eigen::VectorXd& y,
                            const WarHyperParams& params) {
  const Eigen::Index dim = k.rows();
  if (k.cols() != dim || m0.rows() != dim || m0.cols() != dim ||
      m.rows() != dim || m.cols() != dim || e.size() != dim ||
      y.size() != dim)
    throw DimensionMismatch("solve_alpha blocks disagree in size");
  Eigen::MatrixXd c = params.lambda_p * m0 + params.lambda_q * m;
  c += Eigen::MatrixXd(e.asDiagonal());
  Eigen::MatrixXd a = c * k;
  a.diagonal().array() += params.sigma;
  return detail::solve_linear(a, e.cwiseProduct(y));
}

double objective_value(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& k,
                       const Eigen::VectorXd& e, const Eigen::MatrixXd& m0,
                       const Eigen::MatrixXd& m, const Eigen::VectorXd& y,
                       const WarHyperParams& params) {
  const Eigen::Index dim = k.rows();
  if (alpha.size() != dim || e.size() != dim || y.size() != dim ||
      m0.rows() != dim || m.rows() != dim)
    throw DimensionMismatch("objective blocks disagree in size");
  const Eigen::VectorXd f = k * alpha;
  const Eigen::VectorXd r = y - f;
  double value = r.dot(e.cwiseProduct(r));
  value += params.sigma * alpha.dot(f);
  value += params.lambda_p * f.dot(m0 * f);
  value += params.lambda_q * f.dot(m * f);
  return value;
}

namespace {

Eigen::VectorXd stack_labels(const SourceDomain& source,
                             const TargetState& target,
                             const std::vector<Label>& pseudo) {
  const int n = static_cast<int>(source.y.size());
  const int m_l = static_cast<int>(target.y_labeled.size());
  const int m_u = static_cast<int>(pseudo.size());
  Eigen::VectorXd y(n + m_l + m_u);
  for (int i = 0; i < n; ++i) y[i] = label_value(source.y[i]);
  for (int i = 0; i < m_l; ++i) y[n + i] = label_value(target.y_labeled[i]);
  for (int i = 0; i < m_u; ++i) y[n + m_l + i] = label_value(pseudo[i]);
  return y;
}

}  // namespace

KernelModel fit_war(const SourceDomain& source, const TargetState& target,
                    const WarHyperParams& params, const KernelSpec& spec,
                    const Labeler* initial_pseudo) {
  const int n = static_cast<int>(source.x.rows());
  const int m_l = static_cast<int>(target.x_labeled.rows());
  const int m_u = static_cast<int>(target.x_unlabeled.rows());
  const int d = static_cast<int>(source.x.cols());
  if (static_cast<int>(source.y.size()) != n)
    throw DimensionMismatch("source rows and labels disagree");
  if (static_cast<int>(target.y_labeled.size()) != m_l)
    throw DimensionMismatch("labeled target rows and labels disagree");
  if ((m_l > 0 && target.x_labeled.cols() != d) ||
      (m_u > 0 && target.x_unlabeled.cols() != d))
    throw DimensionMismatch("feature dimensions disagree across domains");
  const int n1 = source.count(Label::Target);
  if (n1 == 0 || n1 == n)
    throw MissingClassError("source domain '" + source.id +
                            "' contains a single class");

  const Eigen::Index dim = n + m_l + m_u;
  Eigen::MatrixXd x(dim, d);
  x.topRows(n) = source.x;
  if (m_l > 0) x.middleRows(n, m_l) = target.x_labeled;
  if (m_u > 0) x.bottomRows(m_u) = target.x_unlabeled;

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
  const Eigen::VectorXd e = loss_weight_diagonal(w, n, m_l, m_u);
  const Eigen::VectorXd a_marginal = detail::marginal_mmd_factor(n, m_l + m_u);

  std::vector<Label> pseudo;
  if (m_u > 0) {
    if (target.pseudo_labels) {
      if (static_cast<int>(target.pseudo_labels->size()) != m_u)
        throw DimensionMismatch("pseudo-labels do not cover the pool");
      pseudo = *target.pseudo_labels;
    } else if (initial_pseudo && *initial_pseudo) {
      pseudo = (*initial_pseudo)(target.x_unlabeled);
    } else {
      // Seed from weighted RLS on the labeled rows of this stack (the
      // source rows alone when no target labels exist yet).
      KernelModel init = weighted_rls(model.train_x.topRows(n + m_l),
                                      [&] {
                                        std::vector<Label> yl = source.y;
                                        yl.insert(yl.end(),
                                                  target.y_labeled.begin(),
                                                  target.y_labeled.end());
                                        return yl;
                                      }(),
                                      e.head(n + m_l), params.sigma, model.spec);
      pseudo = predict(init, target.x_unlabeled).labels;
    }
    if (static_cast<int>(pseudo.size()) != m_u)
      throw DimensionMismatch("pseudo-labeler returned the wrong count");
  }

  const int max_rounds = m_u > 0 ? std::max(1, params.pseudo_iters) : 1;
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<Label> target_y = target.y_labeled;
    target_y.insert(target_y.end(), pseudo.begin(), pseudo.end());
    const auto b_cond =
        detail::conditional_mmd_factors(source.y, target_y, n, m_l + m_u);
    const Eigen::VectorXd y = stack_labels(source, target, pseudo);
    model.alpha =
        detail::solve_war_system(k, e, a_marginal, b_cond, y, params);
    model.pseudo_rounds = round + 1;
    if (m_u == 0) break;
    const Eigen::VectorXd pool_values = k.bottomRows(m_u) * model.alpha;
    std::vector<Label> refreshed(m_u);
    for (int i = 0; i < m_u; ++i)
      refreshed[i] = label_from_value(pool_values[i]);
    if (refreshed == pseudo) {
      model.pseudo_stable = true;
      break;
    }
    model.pseudo_stable = false;
    pseudo = std::move(refreshed);
  }

  std::vector<Label> labeled_y = source.y;
  labeled_y.insert(labeled_y.end(), target.y_labeled.begin(),
                   target.y_labeled.end());
  model.train_accuracy = detail::labeled_accuracy(
      k.topRows(n + m_l) * model.alpha, labeled_y, params.bca_fusion_weights);
  return model;
}

}  // namespace warcal
