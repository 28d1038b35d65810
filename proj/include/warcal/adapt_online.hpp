#pragma once

#include <Eigen/Dense>

#include "warcal/adapt_offline.hpp"
#include "warcal/dataset.hpp"
#include "warcal/kernel.hpp"
#include "warcal/model.hpp"

namespace warcal {

// Marginal MMD matrix over the labeled rows only; same block formula as
// the offline builder with m = m_l.
Eigen::MatrixXd marginal_mmd_matrix_online(int n, int m_l);

// Online solver: one closed-form solve over the n source rows and m_l
// labeled target rows. No unlabeled pool and no pseudo-label machinery
// exist on this path. With m_l = 0 no distribution discrepancy is
// measurable, so both MMD terms are dropped and the solve degenerates to
// weighted kernel RLS on the source rows. Requires target.x_unlabeled to
// be empty.
KernelModel fit_owar(const SourceDomain& source, const TargetState& target,
                     const WarHyperParams& params, const KernelSpec& spec);

}  // namespace warcal
