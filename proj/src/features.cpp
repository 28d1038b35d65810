#include "warcal/features.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "warcal/errors.hpp"
#include "warcal/rng.hpp"

namespace warcal {

PcaBasis pca_fit(const Eigen::MatrixXd& x, int n_components) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n < 2) throw InvalidInput("PCA needs at least two rows");
  if (n_components < 1 ||
      n_components > std::min<Eigen::Index>(n - 1, d))
    throw InvalidInput("component count must be in [1, min(rows-1, dim)]");
  if (!x.allFinite()) throw NonFiniteInput("non-finite feature values");

  PcaBasis basis;
  basis.mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - basis.mean.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();

  basis.components = svd.matrixV().leftCols(n_components).transpose();
  basis.explained_variance =
      sv.head(n_components).array().square() / static_cast<double>(n - 1);

  // Deterministic sign convention: the largest-magnitude entry of each
  // component is positive, keeping bases comparable across datasets.
  for (Eigen::Index r = 0; r < basis.components.rows(); ++r) {
    Eigen::Index arg = 0;
    basis.components.row(r).cwiseAbs().maxCoeff(&arg);
    if (basis.components(r, arg) < 0.0) basis.components.row(r) *= -1.0;
  }

  const double tol =
      std::max<Eigen::Index>(n, d) * 1e-15 * std::max(sv[0], 1e-300);
  int nonzero = 0;
  for (int i = 0; i < n_components; ++i)
    if (sv[i] > tol) ++nonzero;
  basis.rank_deficient = nonzero < n_components;
  return basis;
}

Eigen::MatrixXd pca_transform(const PcaBasis& basis, const Eigen::MatrixXd& x) {
  if (x.cols() != basis.mean.size())
    throw DimensionMismatch("raw dimension does not match the basis");
  return (x.rowwise() - basis.mean.transpose()) * basis.components.transpose();
}

std::pair<Eigen::MatrixXd, MinMaxStats> minmax_normalize(const Eigen::MatrixXd& x) {
  if (!x.allFinite()) throw NonFiniteInput("non-finite feature values");
  MinMaxStats stats;
  stats.min = x.colwise().minCoeff();
  stats.max = x.colwise().maxCoeff();
  return {minmax_apply(stats, x), std::move(stats)};
}

Eigen::MatrixXd minmax_apply(const MinMaxStats& stats, const Eigen::MatrixXd& x) {
  if (x.cols() != stats.min.size())
    throw DimensionMismatch("dimension does not match the statistics");
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double span = stats.max[c] - stats.min[c];
    if (span > 0.0)
      out.col(c) = (x.col(c).array() - stats.min[c]) / span;
    else
      out.col(c).setConstant(0.5);
  }
  return out;
}

namespace {

// Orthonormal factor of `m` with deterministic signs (positive diagonal
// in the triangular factor).
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < q.cols(); ++i)
    if (r(i, i) < 0.0) q.col(i) *= -1.0;
  return q;
}

Eigen::MatrixXd gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows,
                                Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

}  // namespace

std::vector<SourceDomain> synth_generate(const SynthConfig& config) {
  if (config.n_domains < 2 || config.samples_per_domain < 2)
    throw ConfigError("generator needs at least 2 domains and 2 samples each");
  if (!(config.target_fraction > 0.0 && config.target_fraction < 0.5))
    throw ConfigError("target_fraction must lie in (0, 0.5)");
  if (config.raw_dim < 2) throw ConfigError("raw_dim must be at least 2");
  if (!(config.class_separation >= 0.0) || !(config.domain_shift_scale >= 0.0))
    throw ConfigError("separation and shift scale must be non-negative");

  const int d = config.raw_dim;
  const int per_domain = config.samples_per_domain;
  const int n_targets = static_cast<int>(
      std::lround(per_domain * config.target_fraction));

  // Structure shared by every domain: the class axis plus a handful of
  // higher-variance background directions, drawn once per dataset. The
  // shared structure is what per-domain feature extraction can recover
  // consistently.
  std::mt19937_64 base_rng(mix_seed(config.seed, 0));
  const int n_background = std::min(6, d - 1);
  const Eigen::MatrixXd frame =
      orthonormalize(gaussian_matrix(base_rng, d, d));
  const Eigen::VectorXd class_axis = frame.col(0);
  Eigen::VectorXd background_std(n_background);
  for (int j = 0; j < n_background; ++j)
    background_std[j] = 2.0 - 0.15 * j;

  std::vector<SourceDomain> domains;
  domains.reserve(static_cast<std::size_t>(config.n_domains));
  for (int z = 0; z < config.n_domains; ++z) {
    std::mt19937_64 rng(mix_seed(config.seed, static_cast<std::uint64_t>(z) + 1));
    const double s = config.domain_shift_scale;

    Eigen::MatrixXd rotation;
    Eigen::VectorXd translation;
    if (s > 0.0) {
      const Eigen::MatrixXd perturbation =
          gaussian_matrix(rng, d, d) / std::sqrt(static_cast<double>(d));
      rotation = orthonormalize(Eigen::MatrixXd::Identity(d, d) + s * perturbation);
      translation = s * gaussian_matrix(rng, d, 1);
    } else {
      rotation = Eigen::MatrixXd::Identity(d, d);
      translation = Eigen::VectorXd::Zero(d);
    }

    SourceDomain domain;
    domain.id = "s" + std::string(z + 1 < 10 ? "0" : "") + std::to_string(z + 1);
    domain.x.resize(per_domain, d);
    domain.y.resize(static_cast<std::size_t>(per_domain));

    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < per_domain; ++i) {
      const Label label = i < n_targets ? Label::Target : Label::NonTarget;
      const double offset =
          0.5 * config.class_separation * (label == Label::Target ? 1.0 : -1.0);
      Eigen::VectorXd sample = offset * class_axis;
      for (int j = 0; j < n_background; ++j)
        sample += background_std[j] * normal(rng) * frame.col(j + 1);
      for (int j = 0; j < d; ++j) sample[j] += normal(rng);
      domain.x.row(i) = (rotation * sample + translation).transpose();
      domain.y[static_cast<std::size_t>(i)] = label;
    }

    // Interleave the classes the way an oddball sequence would.
    std::vector<int> order(per_domain);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::MatrixXd shuffled(per_domain, d);
    std::vector<Label> shuffled_y(static_cast<std::size_t>(per_domain));
    for (int i = 0; i < per_domain; ++i) {
      shuffled.row(i) = domain.x.row(order[i]);
      shuffled_y[static_cast<std::size_t>(i)] =
          domain.y[static_cast<std::size_t>(order[i])];
    }
    domain.x = std::move(shuffled);
    domain.y = std::move(shuffled_y);
    domains.push_back(std::move(domain));
  }
  return domains;
}

}  // namespace warcal
