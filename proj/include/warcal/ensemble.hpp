#pragma once

#include <Eigen/Dense>
#include <vector>

#include "warcal/adapt_offline.hpp"
#include "warcal/adapt_online.hpp"
#include "warcal/dataset.hpp"
#include "warcal/model.hpp"
#include "warcal/sds.hpp"

namespace warcal {

enum class FusionMode { Offline, Online };

// Accuracy-weighted aggregate of per-source-domain models.
struct FusedClassifier {
  struct Member {
    KernelModel model;
    double weight = 0.0;  // >= 0; typically the member's training accuracy
  };
  std::vector<Member> members;
  FusionMode mode = FusionMode::Offline;
};

// Decision value sum_z w_z f_z(q) with the weights normalized to sum 1
// (uniform fallback when they sum to 0); labels by sign with ties going
// to NonTarget.
PredictResult fuse_predict(const FusedClassifier& classifier,
                           const Eigen::MatrixXd& queries);

// Offline orchestration: source selection over class-mean distances (all
// domains retained while no target labels exist, or when k = 1), one
// fit_war per retained domain, fusion by training accuracy. prev, when
// given, labels the unlabeled pool to seed pseudo-labels; otherwise the
// default initializer (per-source weighted RLS on the labeled rows, fused)
// is used.
FusedClassifier fit_warsds(const std::vector<SourceDomain>& sources,
                           const TargetState& target,
                           const WarHyperParams& params, const KernelSpec& spec,
                           int k, const Labeler* prev = nullptr);

// Online orchestration: selection uses the labeled rows' class means only
// (all domains retained at m_l = 0), one fit_owar per retained domain.
FusedClassifier fit_owarsds(const std::vector<SourceDomain>& sources,
                            const TargetState& target,
                            const WarHyperParams& params,
                            const KernelSpec& spec, int k);

// fit_war per source domain with every sample weight and the target
// emphasis forced to 1, no selection, accuracy-weighted fusion.
FusedClassifier baseline_arrls(const std::vector<SourceDomain>& sources,
                               const TargetState& target,
                               const WarHyperParams& params,
                               const KernelSpec& spec,
                               const Labeler* prev = nullptr);

// Weighted kernel RLS on the labeled target rows only. With no labeled
// rows, or a single labeled class, returns the degenerate constant
// classifier (decision value 0, BCA 0.5 on any two-class evaluation).
KernelModel baseline_target_only(const Eigen::MatrixXd& x_labeled,
                                 const std::vector<Label>& y_labeled,
                                 const WarHyperParams& params,
                                 const KernelSpec& spec);

// Per source domain, pools the source rows with the labeled target rows
// and trains weighted kernel RLS (no MMD terms); fusion by training
// accuracy. with_sds applies source selection first, using labeled-only
// class means.
FusedClassifier baseline_tl(const std::vector<SourceDomain>& sources,
                            const Eigen::MatrixXd& x_labeled,
                            const std::vector<Label>& y_labeled,
                            const WarHyperParams& params, const KernelSpec& spec,
                            bool with_sds, int k);

namespace detail {

// Loss-weight diagonal for one source domain pooled with the labeled
// target rows, honoring params.balance_classes and params.w_t.
Eigen::VectorXd pooled_loss_weights(const SourceDomain& source,
                                    const TargetState& target,
                                    const WarHyperParams& params);

// Retained source indices from labeled(+pseudo) target class means; all
// indices when selection cannot run (k = 1, fewer than k domains, no
// target labels, or a single represented class).
std::vector<int> select_source_indices(const std::vector<SourceDomain>& sources,
                                       const Eigen::MatrixXd& target_x,
                                       const std::vector<Label>& target_y,
                                       int k);

}  // namespace detail

}  // namespace warcal
