#include "warcal/ensemble.hpp"

#include <algorithm>
#include <unordered_set>

#include "warcal/errors.hpp"

namespace warcal {

namespace detail {

Eigen::VectorXd pooled_loss_weights(const SourceDomain& source,
                                    const TargetState& target,
                                    const WarHyperParams& params) {
  const int n = static_cast<int>(source.y.size());
  const int m_l = static_cast<int>(target.y_labeled.size());
  WeightAssignment w;
  w.source = params.balance_classes ? source_sample_weights(source)
                                    : Eigen::VectorXd::Ones(n);
  w.target = m_l == 0 ? Eigen::VectorXd()
             : params.balance_classes ? target_sample_weights(target)
                                      : Eigen::VectorXd::Ones(m_l);
  w.target_overall = params.w_t;
  return loss_weight_diagonal(w, n, m_l, 0);
}

std::vector<int> select_source_indices(const std::vector<SourceDomain>& sources,
                                       const Eigen::MatrixXd& target_x,
                                       const std::vector<Label>& target_y,
                                       int k) {
  std::vector<int> all(sources.size());
  for (std::size_t z = 0; z < sources.size(); ++z) all[z] = static_cast<int>(z);
  if (k <= 1 || static_cast<int>(sources.size()) < k) return all;
  if (target_y.empty()) return all;
  const int targets = static_cast<int>(
      std::count(target_y.begin(), target_y.end(), Label::Target));
  if (targets == 0 || targets == static_cast<int>(target_y.size()))
    return all;  // one represented class; no usable class means

  const ClassMeans means = class_means(target_x, target_y);
  std::vector<DomainDistance> distances;
  distances.reserve(sources.size());
  for (const auto& source : sources)
    distances.push_back({source.id, domain_distance(source, means)});
  const std::vector<std::string> ids = select_sources(distances, k);
  const std::unordered_set<std::string> keep(ids.begin(), ids.end());
  std::vector<int> retained;
  for (std::size_t z = 0; z < sources.size(); ++z)
    if (keep.count(sources[z].id) > 0) retained.push_back(static_cast<int>(z));
  return retained;
}

}  // namespace detail

PredictResult fuse_predict(const FusedClassifier& classifier,
                           const Eigen::MatrixXd& queries) {
  if (classifier.members.empty()) throw EmptyEnsemble("fused classifier has no members");
  double total = 0.0;
  for (const auto& member : classifier.members) total += member.weight;
  PredictResult out;
  out.values = Eigen::VectorXd::Zero(queries.rows());
  for (const auto& member : classifier.members) {
    const double w = total > 0.0 ? member.weight / total
                                 : 1.0 / classifier.members.size();
    out.values += w * predict(member.model, queries).values;
  }
  out.labels.reserve(static_cast<std::size_t>(out.values.size()));
  for (Eigen::Index i = 0; i < out.values.size(); ++i)
    out.labels.push_back(label_from_value(out.values[i]));
  return out;
}

namespace {

// Labeled target rows + pool pseudo-labels, concatenated for the
// selection step's class means.
std::pair<Eigen::MatrixXd, std::vector<Label>> selection_view(
    const TargetState& target, const std::vector<Label>& pseudo) {
  const int m_l = static_cast<int>(target.x_labeled.rows());
  const int m_u = static_cast<int>(pseudo.size());
  Eigen::MatrixXd x(m_l + m_u, std::max(target.x_labeled.cols(),
                                        target.x_unlabeled.cols()));
  if (m_l > 0) x.topRows(m_l) = target.x_labeled;
  if (m_u > 0) x.bottomRows(m_u) = target.x_unlabeled;
  std::vector<Label> y = target.y_labeled;
  y.insert(y.end(), pseudo.begin(), pseudo.end());
  return {std::move(x), std::move(y)};
}

FusedClassifier fuse_members(std::vector<KernelModel> models, FusionMode mode) {
  FusedClassifier fused;
  fused.mode = mode;
  fused.members.reserve(models.size());
  for (auto& model : models) {
    const double weight = model.train_accuracy;
    fused.members.push_back({std::move(model), weight});
  }
  return fused;
}

}  // namespace

FusedClassifier fit_warsds(const std::vector<SourceDomain>& sources,
                           const TargetState& target,
                           const WarHyperParams& params, const KernelSpec& spec,
                           int k, const Labeler* prev) {
  if (sources.empty()) throw TooFewDomains("no source domains");
  const int m_l = static_cast<int>(target.x_labeled.rows());
  const int m_u = static_cast<int>(target.x_unlabeled.rows());

  // One pseudo-labeling of the pool is shared by the selection step and
  // every member fit: the previous iteration's classifier when available,
  // else the accuracy-fused per-source RLS initializer.
  TargetState seeded = target;
  if (m_u > 0 && !seeded.pseudo_labels) {
    if (prev && *prev) {
      seeded.pseudo_labels = (*prev)(target.x_unlabeled);
    } else {
      const FusedClassifier init =
          baseline_tl(sources, target.x_labeled, target.y_labeled, params,
                      spec, /*with_sds=*/false, k);
      seeded.pseudo_labels = fuse_predict(init, target.x_unlabeled).labels;
    }
  }

  std::vector<int> retained;
  if (m_l == 0) {
    retained.resize(sources.size());
    for (std::size_t z = 0; z < sources.size(); ++z)
      retained[z] = static_cast<int>(z);
  } else {
    const auto [sel_x, sel_y] = selection_view(
        seeded, seeded.pseudo_labels ? *seeded.pseudo_labels
                                     : std::vector<Label>());
    retained = detail::select_source_indices(sources, sel_x, sel_y, k);
  }

  std::vector<KernelModel> models;
  models.reserve(retained.size());
  for (int z : retained)
    models.push_back(fit_war(sources[z], seeded, params, spec));
  return fuse_members(std::move(models), FusionMode::Offline);
}

FusedClassifier fit_owarsds(const std::vector<SourceDomain>& sources,
                            const TargetState& target,
                            const WarHyperParams& params,
                            const KernelSpec& spec, int k) {
  if (sources.empty()) throw TooFewDomains("no source domains");
  std::vector<int> retained = detail::select_source_indices(
      sources, target.x_labeled, target.y_labeled, k);
  std::vector<KernelModel> models;
  models.reserve(retained.size());
  for (int z : retained)
    models.push_back(fit_owar(sources[z], target, params, spec));
  return fuse_members(std::move(models), FusionMode::Online);
}

FusedClassifier baseline_arrls(const std::vector<SourceDomain>& sources,
                               const TargetState& target,
                               const WarHyperParams& params,
                               const KernelSpec& spec, const Labeler* prev) {
  if (sources.empty()) throw TooFewDomains("no source domains");
  WarHyperParams uniform = params;
  uniform.w_t = 1.0;
  uniform.balance_classes = false;
  std::vector<KernelModel> models;
  models.reserve(sources.size());
  for (const auto& source : sources)
    models.push_back(fit_war(source, target, uniform, spec, prev));
  return fuse_members(std::move(models), FusionMode::Offline);
}

KernelModel baseline_target_only(const Eigen::MatrixXd& x_labeled,
                                 const std::vector<Label>& y_labeled,
                                 const WarHyperParams& params,
                                 const KernelSpec& spec) {
  const int m_l = static_cast<int>(y_labeled.size());
  const int targets = static_cast<int>(
      std::count(y_labeled.begin(), y_labeled.end(), Label::Target));
  if (m_l == 0 || targets == 0 || targets == m_l) {
    // Constant classifier: decision value 0 everywhere, BCA 0.5 on any
    // two-class evaluation.
    KernelModel degenerate;
    degenerate.spec = spec;
    degenerate.train_x.resize(0, x_labeled.cols());
    degenerate.train_accuracy = 0.5;
    return degenerate;
  }
  TargetState labeled_only;
  labeled_only.x_labeled = x_labeled;
  labeled_only.y_labeled = y_labeled;
  return weighted_rls(x_labeled, y_labeled,
                      target_sample_weights(labeled_only), params.sigma, spec,
                      params.bca_fusion_weights);
}

FusedClassifier baseline_tl(const std::vector<SourceDomain>& sources,
                            const Eigen::MatrixXd& x_labeled,
                            const std::vector<Label>& y_labeled,
                            const WarHyperParams& params, const KernelSpec& spec,
                            bool with_sds, int k) {
  if (sources.empty()) throw TooFewDomains("no source domains");
  TargetState target;
  target.x_labeled = x_labeled;
  target.y_labeled = y_labeled;

  std::vector<int> retained;
  if (with_sds) {
    retained = detail::select_source_indices(sources, x_labeled, y_labeled, k);
  } else {
    retained.resize(sources.size());
    for (std::size_t z = 0; z < sources.size(); ++z)
      retained[z] = static_cast<int>(z);
  }

  const int m_l = static_cast<int>(y_labeled.size());
  std::vector<KernelModel> models;
  models.reserve(retained.size());
  for (int z : retained) {
    const SourceDomain& source = sources[z];
    const int n = static_cast<int>(source.x.rows());
    Eigen::MatrixXd pooled(n + m_l, source.x.cols());
    pooled.topRows(n) = source.x;
    if (m_l > 0) pooled.bottomRows(m_l) = x_labeled;
    std::vector<Label> pooled_y = source.y;
    pooled_y.insert(pooled_y.end(), y_labeled.begin(), y_labeled.end());
    models.push_back(weighted_rls(
        pooled, pooled_y, detail::pooled_loss_weights(source, target, params),
        params.sigma, spec, params.bca_fusion_weights));
  }
  return fuse_members(std::move(models), FusionMode::Online);
}

}  // namespace warcal
