#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "warcal/dataset.hpp"

namespace warcal {

struct PcaBasis {
  Eigen::VectorXd mean;        // length d_raw
  Eigen::MatrixXd components;  // n_comp x d_raw, orthonormal rows
  Eigen::VectorXd explained_variance;  // non-increasing
  // Fewer nonzero variances than requested components; the trailing rows
  // are an arbitrary orthonormal completion.
  bool rank_deficient = false;
};

// Top principal directions of the mean-centered rows of x. Component signs
// are fixed so that each row's largest-magnitude entry is positive, which
// keeps bases comparable across similarly-distributed datasets.
PcaBasis pca_fit(const Eigen::MatrixXd& x, int n_components);

// Scores (x - mean) * components^T.
Eigen::MatrixXd pca_transform(const PcaBasis& basis, const Eigen::MatrixXd& x);

struct MinMaxStats {
  Eigen::VectorXd min;
  Eigen::VectorXd max;
};

// Affinely maps each column to [0, 1]; constant columns map to 0.5.
std::pair<Eigen::MatrixXd, MinMaxStats> minmax_normalize(const Eigen::MatrixXd& x);

// Applies previously computed column statistics; rows outside the fitted
// range land outside [0, 1].
Eigen::MatrixXd minmax_apply(const MinMaxStats& stats, const Eigen::MatrixXd& x);

// Synthetic multi-domain generator: class-conditional Gaussian clusters
// with a shared low-rank background structure, then a per-domain random
// rotation and translation whose magnitude is domain_shift_scale (0 makes
// every domain identically distributed). Deterministic in seed; each
// domain draws from its own derived stream.
struct SynthConfig {
  int n_domains = 14;
  int samples_per_domain = 270;
  double target_fraction = 34.0 / 270.0;  // in (0, 0.5)
  int raw_dim = 30;
  double class_separation = 3.0;
  double domain_shift_scale = 0.15;
  std::uint64_t seed = 1;
};

std::vector<SourceDomain> synth_generate(const SynthConfig& config);

}  // namespace warcal
