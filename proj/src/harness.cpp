#include "warcal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "warcal/adapt_online.hpp"
#include "warcal/ensemble.hpp"
#include "warcal/errors.hpp"
#include "warcal/rng.hpp"

namespace warcal {

double bca(const std::vector<Label>& predicted, const std::vector<Label>& truth) {
  if (predicted.size() != truth.size())
    throw DimensionMismatch("prediction and truth lengths disagree");
  int hit[2] = {0, 0};
  int total[2] = {0, 0};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int c = truth[i] == Label::Target ? 0 : 1;
    ++total[c];
    if (predicted[i] == truth[i]) ++hit[c];
  }
  if (total[0] == 0 || total[1] == 0)
    throw MissingClassError("truth labels lack a class; BCA undefined");
  return 0.5 * (static_cast<double>(hit[0]) / total[0] +
                static_cast<double>(hit[1]) / total[1]);
}

double aupc(const std::vector<CurvePoint>& curve) {
  if (curve.empty()) throw EmptyCurve("empty learning curve");
  if (curve.size() == 1) return curve[0].bca;
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    area += 0.5 * (curve[i - 1].bca + curve[i].bca);
  return area / static_cast<double>(curve.size() - 1);
}

namespace detail {

std::vector<int> labeled_indices(int m0, int m, int count) {
  if (m < 1 || m0 < 1 || m0 > m) throw InvalidInput("bad starting position");
  std::vector<int> idx;
  const int distinct = std::min(count, m);
  idx.reserve(static_cast<std::size_t>(distinct));
  for (int j = 0; j < distinct; ++j) idx.push_back((m0 - 1 + j) % m);
  return idx;
}

std::pair<PcaBasis, MinMaxStats> online_target_pipeline(
    const Eigen::MatrixXd& target_raw, const std::vector<int>& labeled_idx,
    const Eigen::MatrixXd& pooled_source_raw, int n_components) {
  const int m_l = static_cast<int>(labeled_idx.size());
  if (m_l > n_components) {
    Eigen::MatrixXd rows(m_l, target_raw.cols());
    for (int i = 0; i < m_l; ++i) rows.row(i) = target_raw.row(labeled_idx[i]);
    PcaBasis basis = pca_fit(rows, n_components);
    MinMaxStats stats = minmax_normalize(pca_transform(basis, rows)).second;
    return {std::move(basis), std::move(stats)};
  }
  // Too few labeled rows to span the requested components; borrow the
  // pooled source rows for the basis and the normalization statistics.
  PcaBasis basis = pca_fit(pooled_source_raw, n_components);
  MinMaxStats stats =
      minmax_normalize(pca_transform(basis, pooled_source_raw)).second;
  return {std::move(basis), std::move(stats)};
}

}  // namespace detail

namespace {

struct ProcessedDomain {
  std::string id;
  Eigen::MatrixXd features;
  std::vector<Label> labels;
};

ProcessedDomain process_domain(const SourceDomain& raw, int n_components) {
  const PcaBasis basis = pca_fit(raw.x, n_components);
  const auto [features, stats] = minmax_normalize(pca_transform(basis, raw.x));
  (void)stats;
  return {raw.id, features, raw.y};
}

// Everything shared by the runs of one held-out subject.
struct SubjectContext {
  int subject_index = 0;
  std::string subject_id;
  const std::vector<SourceDomain>* raw = nullptr;
  std::vector<SourceDomain> sources;       // processed, per-domain pipeline
  Eigen::MatrixXd target_offline_features; // full-pool pipeline
  std::vector<Label> target_labels;
  Eigen::MatrixXd pooled_source_raw;       // online fallback basis input
  KernelModel oracle;                      // fully-labeled reference model
};

SubjectContext make_subject_context(const std::vector<SourceDomain>& raw,
                                    const std::vector<ProcessedDomain>& processed,
                                    int subject, const ExperimentConfig& config) {
  SubjectContext ctx;
  ctx.subject_index = subject;
  ctx.subject_id = raw[static_cast<std::size_t>(subject)].id;
  ctx.raw = &raw;
  for (std::size_t z = 0; z < processed.size(); ++z) {
    if (static_cast<int>(z) == subject) continue;
    ctx.sources.push_back(
        {processed[z].id, processed[z].features, processed[z].labels});
  }
  ctx.target_offline_features = processed[static_cast<std::size_t>(subject)].features;
  ctx.target_labels = processed[static_cast<std::size_t>(subject)].labels;

  Eigen::Index pooled_rows = 0;
  for (std::size_t z = 0; z < raw.size(); ++z)
    if (static_cast<int>(z) != subject) pooled_rows += raw[z].x.rows();
  ctx.pooled_source_raw.resize(pooled_rows, raw[0].x.cols());
  Eigen::Index at = 0;
  for (std::size_t z = 0; z < raw.size(); ++z) {
    if (static_cast<int>(z) == subject) continue;
    ctx.pooled_source_raw.middleRows(at, raw[z].x.rows()) = raw[z].x;
    at += raw[z].x.rows();
  }

  ctx.oracle = baseline_target_only(ctx.target_offline_features,
                                    ctx.target_labels, config.params,
                                    config.kernel);
  return ctx;
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& x, const std::vector<int>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
  return out;
}

std::vector<Label> labels_of(const std::vector<Label>& y, const std::vector<int>& idx) {
  std::vector<Label> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(y[static_cast<std::size_t>(i)]);
  return out;
}

Labeler wrap(const FusedClassifier& fused) {
  return [fused](const Eigen::MatrixXd& q) { return fuse_predict(fused, q).labels; };
}

bool uses_sources(Algorithm a) {
  return a != Algorithm::TargetOnly && a != Algorithm::OracleUpperBound;
}

// One (held-out subject, run) pair: the full calibration loop for every
// requested algorithm.
std::vector<RunResult> run_pair(const SubjectContext& ctx, int run_index,
                                const ExperimentConfig& config) {
  const int m = static_cast<int>(ctx.target_labels.size());
  std::mt19937_64 rng(
      mix_seed(mix_seed(config.seed, static_cast<std::uint64_t>(ctx.subject_index)),
               static_cast<std::uint64_t>(run_index) + 0x51D1ULL));
  const int m0 = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(m));

  const std::size_t n_algos = config.algorithms.size();
  std::vector<RunResult> results(n_algos);
  for (std::size_t a = 0; a < n_algos; ++a) {
    results[a].mode = config.mode;
    results[a].algorithm = config.algorithms[a];
    results[a].subject_id = ctx.subject_id;
    results[a].run_index = run_index;
    results[a].m0 = m0;
  }

  // Pseudo-label chaining across calibration iterations, one classifier
  // per pool-based algorithm.
  std::vector<Labeler> prev(n_algos);
  std::vector<double> retained_sum(n_algos, 0.0);
  const double z_total = static_cast<double>(ctx.sources.size());
  const Eigen::MatrixXd& target_raw =
      (*ctx.raw)[static_cast<std::size_t>(ctx.subject_index)].x;

  for (int t = 0; t < config.max_iterations; ++t) {
    const int want = t * config.p;
    if (t > 0 && want >= m) break;  // everything labeled; nothing to score
    const std::vector<int> labeled = detail::labeled_indices(m0, m, want);
    std::vector<char> is_labeled(static_cast<std::size_t>(m), 0);
    for (int i : labeled) is_labeled[static_cast<std::size_t>(i)] = 1;
    std::vector<int> eval_idx;
    eval_idx.reserve(static_cast<std::size_t>(m - want));
    for (int i = 0; i < m; ++i)
      if (!is_labeled[static_cast<std::size_t>(i)]) eval_idx.push_back(i);
    const std::vector<Label> eval_truth = labels_of(ctx.target_labels, eval_idx);
    const bool have_both =
        std::count(eval_truth.begin(), eval_truth.end(), Label::Target) > 0 &&
        std::count(eval_truth.begin(), eval_truth.end(), Label::NonTarget) > 0;
    if (!have_both) break;

    // Target features for this iteration.
    Eigen::MatrixXd online_features;
    if (config.mode == Mode::Online) {
      const auto [basis, stats] = detail::online_target_pipeline(
          target_raw, labeled, ctx.pooled_source_raw, config.pca_components);
      online_features = minmax_apply(stats, pca_transform(basis, target_raw));
    }
    const Eigen::MatrixXd& tf = config.mode == Mode::Online
                                    ? online_features
                                    : ctx.target_offline_features;

    TargetState state;
    state.x_labeled = rows_of(tf, labeled);
    state.y_labeled = labels_of(ctx.target_labels, labeled);
    const Eigen::MatrixXd x_eval = rows_of(tf, eval_idx);
    if (config.mode == Mode::Offline) state.x_unlabeled = x_eval;

    for (std::size_t a = 0; a < n_algos; ++a) {
      const Algorithm algo = config.algorithms[a];
      const auto start = std::chrono::steady_clock::now();
      std::vector<Label> predicted;
      double retained = uses_sources(algo) ? 1.0 : 0.0;
      switch (algo) {
        case Algorithm::War:
        case Algorithm::WarSds: {
          const int k = algo == Algorithm::WarSds ? config.k : 1;
          const FusedClassifier fused =
              fit_warsds(ctx.sources, state, config.params, config.kernel, k,
                         prev[a] ? &prev[a] : nullptr);
          retained = fused.members.size() / z_total;
          predicted = fuse_predict(fused, x_eval).labels;
          prev[a] = wrap(fused);
          break;
        }
        case Algorithm::Arrls: {
          const FusedClassifier fused =
              baseline_arrls(ctx.sources, state, config.params, config.kernel,
                             prev[a] ? &prev[a] : nullptr);
          predicted = fuse_predict(fused, x_eval).labels;
          prev[a] = wrap(fused);
          break;
        }
        case Algorithm::Owar:
        case Algorithm::OwarSds: {
          const int k = algo == Algorithm::OwarSds ? config.k : 1;
          const FusedClassifier fused =
              fit_owarsds(ctx.sources, state, config.params, config.kernel, k);
          retained = fused.members.size() / z_total;
          predicted = fuse_predict(fused, x_eval).labels;
          break;
        }
        case Algorithm::Tl:
        case Algorithm::TlSds: {
          const FusedClassifier fused = baseline_tl(
              ctx.sources, state.x_labeled, state.y_labeled, config.params,
              config.kernel, algo == Algorithm::TlSds, config.k);
          if (algo == Algorithm::TlSds) retained = fused.members.size() / z_total;
          predicted = fuse_predict(fused, x_eval).labels;
          break;
        }
        case Algorithm::TargetOnly: {
          const KernelModel model = baseline_target_only(
              state.x_labeled, state.y_labeled, config.params, config.kernel);
          predicted = predict(model, x_eval).labels;
          break;
        }
        case Algorithm::OracleUpperBound: {
          // Reference curve: fully-labeled model over the full-pool
          // features, scored on the same evaluation rows.
          predicted =
              predict(ctx.oracle, rows_of(ctx.target_offline_features, eval_idx))
                  .labels;
          break;
        }
      }
      const auto stop = std::chrono::steady_clock::now();
      results[a].curve.push_back({want, bca(predicted, eval_truth)});
      results[a].wall_time_s +=
          std::chrono::duration<double>(stop - start).count();
      retained_sum[a] += retained;
    }
  }

  for (std::size_t a = 0; a < n_algos; ++a) {
    results[a].aupc = aupc(results[a].curve);
    results[a].retained_fraction =
        retained_sum[a] / static_cast<double>(results[a].curve.size());
  }
  return results;
}

void parallel_tasks(int n_tasks, int jobs, const std::function<void(int)>& body) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n_tasks <= 1) {
    for (int i = 0; i < n_tasks; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_tasks) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min(jobs, n_tasks);
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<RunResult> simulate(const ExperimentConfig& config0, int jobs) {
  ExperimentConfig config = config0;
  if (config.algorithms.empty()) {
    if (config.mode == Mode::Offline)
      config.algorithms = {Algorithm::WarSds,     Algorithm::War,
                           Algorithm::Arrls,      Algorithm::Tl,
                           Algorithm::TlSds,      Algorithm::TargetOnly,
                           Algorithm::OracleUpperBound};
    else
      config.algorithms = {Algorithm::OwarSds,    Algorithm::Owar,
                           Algorithm::Tl,         Algorithm::TlSds,
                           Algorithm::TargetOnly, Algorithm::OracleUpperBound};
  }
  if (config.synth.seed == 0)
    config.synth.seed = mix_seed(config.seed, 0xDA7AULL);
  validate(config);

  const std::vector<SourceDomain> raw = synth_generate(config.synth);
  std::vector<ProcessedDomain> processed;
  processed.reserve(raw.size());
  for (const auto& domain : raw)
    processed.push_back(process_domain(domain, config.pca_components));

  const int n_subjects =
      config.subjects_limit > 0
          ? std::min(config.subjects_limit, static_cast<int>(raw.size()))
          : static_cast<int>(raw.size());
  std::vector<SubjectContext> contexts;
  contexts.reserve(static_cast<std::size_t>(n_subjects));
  for (int s = 0; s < n_subjects; ++s)
    contexts.push_back(make_subject_context(raw, processed, s, config));

  const int n_tasks = n_subjects * config.runs_per_subject;
  std::vector<std::vector<RunResult>> slots(static_cast<std::size_t>(n_tasks));
  parallel_tasks(n_tasks, jobs, [&](int task) {
    const int subject = task / config.runs_per_subject;
    const int run = task % config.runs_per_subject;
    slots[static_cast<std::size_t>(task)] =
        run_pair(contexts[static_cast<std::size_t>(subject)], run, config);
  });

  std::vector<RunResult> results;
  results.reserve(static_cast<std::size_t>(n_tasks) * config.algorithms.size());
  for (auto& slot : slots)
    for (auto& r : slot) results.push_back(std::move(r));
  return results;
}

std::vector<RunResult> simulate_offline(const ExperimentConfig& config, int jobs) {
  if (config.mode != Mode::Offline)
    throw ConfigError("simulate_offline requires offline mode");
  return simulate(config, jobs);
}

std::vector<RunResult> simulate_online(const ExperimentConfig& config, int jobs) {
  if (config.mode != Mode::Online)
    throw ConfigError("simulate_online requires online mode");
  return simulate(config, jobs);
}

std::vector<SweepRow> sensitivity_sweep(const ExperimentConfig& config,
                                        const std::vector<double>& sigma_grid,
                                        const std::vector<double>& lambda_grid,
                                        int jobs) {
  const std::vector<double> sigmas =
      sigma_grid.empty() ? std::vector<double>{config.params.sigma} : sigma_grid;
  const std::vector<double> lambdas = lambda_grid.empty()
                                          ? std::vector<double>{config.params.lambda_p}
                                          : lambda_grid;
  std::vector<SweepRow> rows;
  for (double sigma : sigmas) {
    for (double lambda : lambdas) {
      ExperimentConfig point = config;
      point.params.sigma = sigma;
      point.params.lambda_p = lambda;
      point.params.lambda_q = lambda;
      const std::vector<RunResult> results = simulate(point, jobs);
      // mean BCA per (algorithm, labeled count) across subjects and runs
      std::map<std::pair<Algorithm, int>, std::pair<double, int>> acc;
      for (const auto& r : results)
        for (const auto& pt : r.curve) {
          auto& cell = acc[{r.algorithm, pt.labeled_count}];
          cell.first += pt.bca;
          cell.second += 1;
        }
      for (const auto& [key, cell] : acc)
        rows.push_back({sigma, lambda, key.first, key.second,
                        cell.first / cell.second});
    }
  }
  return rows;
}

}  // namespace warcal
