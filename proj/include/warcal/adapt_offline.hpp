#pragma once

#include <Eigen/Dense>
#include <array>

#include "warcal/dataset.hpp"
#include "warcal/kernel.hpp"
#include "warcal/model.hpp"

namespace warcal {

// Hyper-parameters shared by the offline and online solvers.
struct WarHyperParams {
  double w_t = 2.0;        // overall emphasis on labeled target rows, >= 1
  double sigma = 0.1;      // structural-risk weight
  double lambda_p = 10.0;  // marginal-distribution MMD weight
  double lambda_q = 10.0;  // conditional-distribution MMD weight
  int pseudo_iters = 5;    // offline pseudo-label refinement rounds, >= 1

  // Class-imbalance sample weights; uniform weights when false (the ARRLS
  // reduction).
  bool balance_classes = true;
  // Fusion weights use balanced accuracy instead of the raw fraction.
  bool bca_fusion_weights = false;
};

// Marginal MMD matrix over n source rows followed by m target rows: the
// rank-one outer product a a^T with a_i = 1/n on the source block and
// -1/m on the target block. Entries are 1/n^2, 1/m^2 and -1/(n m).
Eigen::MatrixXd marginal_mmd_matrix(int n, int m);

// Conditional MMD matrix: sum over both classes of a per-class rank-one
// outer product (1/n_c on source members, -1/m_c on target members).
// Target membership uses the labeled rows' labels plus pseudo-labels for
// the unlabeled pool; a class with no target members contributes a zero
// block. Throws MissingPseudoLabels when the pool is unlabeled.
Eigen::MatrixXd conditional_mmd_matrix(const SourceDomain& source,
                                       const TargetState& target);

// Closed-form coefficients: solves
//   [(E + lambda_p M0 + lambda_q M) K + sigma I] alpha = E y
// by dense factorization (never explicit inversion).
Eigen::VectorXd solve_alpha(const Eigen::MatrixXd& k, const Eigen::VectorXd& e,
                            const Eigen::MatrixXd& m0, const Eigen::MatrixXd& m,
                            const Eigen::VectorXd& y,
                            const WarHyperParams& params);

// (y - K a)^T E (y - K a) + sigma a^T K a
//   + lambda_p a^T K M0 K a + lambda_q a^T K M K a
double objective_value(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& k,
                       const Eigen::VectorXd& e, const Eigen::MatrixXd& m0,
                       const Eigen::MatrixXd& m, const Eigen::VectorXd& y,
                       const WarHyperParams& params);

// Offline solver for one source domain. Stacks source rows, labeled target
// rows and the unlabeled pool, then alternates closed-form solves with
// pseudo-label refreshes on the pool (early stop once the labels repeat).
// Initial pool labels come from target.pseudo_labels when present, else
// from initial_pseudo, else from a weighted RLS fit on the labeled rows of
// the stack. Training accuracy is measured on the n + m_l labeled rows.
KernelModel fit_war(const SourceDomain& source, const TargetState& target,
                    const WarHyperParams& params, const KernelSpec& spec,
                    const Labeler* initial_pseudo = nullptr);

namespace detail {

// Rank factor of the marginal MMD matrix; empty when either block is empty.
Eigen::VectorXd marginal_mmd_factor(int n, int m);

// Per-class rank factors of the conditional MMD matrix over n source rows
// and the m_total target rows whose labels are given; a factor is empty
// when its class has no target members.
std::array<Eigen::VectorXd, 2> conditional_mmd_factors(
    const std::vector<Label>& source_y, const std::vector<Label>& target_y,
    int n, int m_total);

// Assembles (E + lambda_p a a^T + lambda_q sum_c b_c b_c^T) K + sigma I
// from the rank factors (empty factors are skipped) and solves against
// E y. Shared by the offline and online fit paths so that their results
// are bit-identical on identical inputs.
Eigen::VectorXd solve_war_system(const Eigen::MatrixXd& k,
                                 const Eigen::VectorXd& e,
                                 const Eigen::VectorXd& a_marginal,
                                 const std::array<Eigen::VectorXd, 2>& b_cond,
                                 const Eigen::VectorXd& y,
                                 const WarHyperParams& params);

}  // namespace detail

}  // namespace warcal
