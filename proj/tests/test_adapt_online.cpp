#include <doctest.h>

#include <random>

#include "warcal/adapt_online.hpp"
#include "warcal/errors.hpp"
#include "support/oracles.hpp"

using namespace warcal;

TEST_CASE("online marginal MMD shares the offline formula") {
  const Eigen::MatrixXd online = marginal_mmd_matrix_online(1, 1);
  Eigen::MatrixXd expected(2, 2);
  expected << 1, -1, -1, 1;
  CHECK((online - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK((marginal_mmd_matrix_online(3, 2) - marginal_mmd_matrix(3, 2))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  const Eigen::MatrixXd m32 = marginal_mmd_matrix_online(3, 2);
  CHECK(std::abs(m32.sum()) <= 1e-15);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m32);
  CHECK(svd.singularValues()[1] <= 1e-15);
}

TEST_CASE("fit_owar refuses an unlabeled pool") {
  std::mt19937_64 rng(3);
  const SourceDomain source = oracles::random_source(rng, 6, 2);
  const TargetState with_pool = oracles::random_target(rng, 2, 3, 2, true);
  CHECK_THROWS_AS(fit_owar(source, with_pool, WarHyperParams{}, KernelSpec{}),
                  InvalidInput);
}

TEST_CASE("fit_owar at m_l=0 is weighted RLS on the source rows") {
  std::mt19937_64 rng(7);
  const SourceDomain source = oracles::random_source(rng, 12, 3);
  TargetState empty;
  empty.x_labeled.resize(0, 3);
  empty.x_unlabeled.resize(0, 3);
  const WarHyperParams params;
  const KernelModel model = fit_owar(source, empty, params, KernelSpec{});
  REQUIRE(model.alpha.size() == 12);

  // direct evaluation of (E K + sigma I) alpha = E y on the source block
  const KernelSpec spec = resolve_bandwidth(KernelSpec{}, source.x);
  const Eigen::MatrixXd k = gram_matrix(source.x, spec);
  const Eigen::VectorXd e = source_sample_weights(source);
  Eigen::VectorXd y(12);
  for (int i = 0; i < 12; ++i) y[i] = label_value(source.y[i]);
  Eigen::MatrixXd system = e.asDiagonal() * k;
  system.diagonal().array() += params.sigma;
  const Eigen::VectorXd expected = system.partialPivLu().solve(e.cwiseProduct(y));
  CHECK((model.alpha - expected).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("fit_owar equals fit_war restricted to the labeled rows") {
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 12);
    const int m_l = 1 + static_cast<int>(rng() % 6);
    const SourceDomain source = oracles::random_source(rng, n, 3);
    const TargetState target = oracles::random_target(rng, m_l, 0, 3, false);
    WarHyperParams params;
    params.pseudo_iters = 1;
    const KernelModel offline = fit_war(source, target, params, KernelSpec{});
    const KernelModel online = fit_owar(source, target, params, KernelSpec{});
    REQUIRE(online.alpha.size() == n + m_l);
    worst = std::max(worst, (offline.alpha - online.alpha).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("fit_owar satisfies its stationarity system") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 10);
    const int m_l = 1 + static_cast<int>(rng() % 5);
    const SourceDomain source = oracles::random_source(rng, n, 3);
    const TargetState target = oracles::random_target(rng, m_l, 0, 3, false);
    const WarHyperParams params;
    const KernelModel model = fit_owar(source, target, params, KernelSpec{});

    const Eigen::MatrixXd k = gram_matrix(model.train_x, model.spec);
    WeightAssignment w;
    w.source = source_sample_weights(source);
    w.target = target_sample_weights(target);
    w.target_overall = params.w_t;
    const Eigen::VectorXd e = loss_weight_diagonal(w, n, m_l, 0);
    const Eigen::MatrixXd m0 = marginal_mmd_matrix_online(n, m_l);
    const Eigen::MatrixXd m = conditional_mmd_matrix(source, target);
    Eigen::VectorXd y(n + m_l);
    for (int i = 0; i < n; ++i) y[i] = label_value(source.y[i]);
    for (int i = 0; i < m_l; ++i)
      y[n + i] = label_value(target.y_labeled[static_cast<std::size_t>(i)]);
    Eigen::MatrixXd system = (Eigen::MatrixXd(e.asDiagonal()) +
                              params.lambda_p * m0 + params.lambda_q * m) *
                             k;
    system.diagonal().array() += params.sigma;
    const Eigen::VectorXd rhs = e.cwiseProduct(y);
    CHECK((system * model.alpha - rhs).norm() <= 1e-8 * rhs.norm());
  }
}

TEST_CASE("fit_owar separates identically-distributed gaussians") {
  std::mt19937_64 rng(17);
  const SourceDomain source = oracles::separable_domain(rng, 60, 20, 2, 6.0);
  SourceDomain extra = oracles::separable_domain(rng, 30, 10, 2, 6.0);
  TargetState target;  // rows 5..14 straddle the class boundary
  target.x_labeled = extra.x.middleRows(5, 10);
  target.y_labeled.assign(extra.y.begin() + 5, extra.y.begin() + 15);
  target.x_unlabeled.resize(0, 2);
  const KernelModel model = fit_owar(source, target, WarHyperParams{}, KernelSpec{});
  CHECK(model.train_accuracy >= 0.95);
}
