// Acceptance suite: every release gate runs here, one PASS/FAIL line per
// criterion. Gates are property-based (closed-form optimality, oracle
// equivalence, structural invariants) plus quantitative checks on the
// default synthetic scenario. Exit code = number of failed criteria.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "warcal/adapt_offline.hpp"
#include "warcal/adapt_online.hpp"
#include "warcal/ensemble.hpp"
#include "warcal/features.hpp"
#include "warcal/harness.hpp"
#include "warcal/sds.hpp"
#include "support/oracles.hpp"

using namespace warcal;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int index, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

struct Instance {
  SourceDomain source;
  TargetState target;
  Eigen::MatrixXd k;
  Eigen::VectorXd e;
  Eigen::MatrixXd m0;
  Eigen::MatrixXd m;
  Eigen::VectorXd y;
  std::vector<Label> target_y;
};

Instance random_instance(std::mt19937_64& rng, int max_n) {
  const int n = 3 + static_cast<int>(rng() % static_cast<unsigned>(max_n - 6));
  const int m_l = 1 + static_cast<int>(rng() % 3);
  const int m_u = static_cast<int>(rng() % 3);
  const int d = 3;
  Instance inst;
  inst.source = oracles::random_source(rng, n, d);
  inst.target = oracles::random_target(rng, m_l, m_u, d, true);
  Eigen::MatrixXd x(n + m_l + m_u, d);
  x.topRows(n) = inst.source.x;
  x.middleRows(n, m_l) = inst.target.x_labeled;
  if (m_u > 0) x.bottomRows(m_u) = inst.target.x_unlabeled;
  const KernelSpec spec = resolve_bandwidth(KernelSpec{}, x);
  inst.k = gram_matrix(x, spec);
  WeightAssignment w;
  w.source = source_sample_weights(inst.source);
  w.target = target_sample_weights(inst.target);
  w.target_overall = 2.0;
  inst.e = loss_weight_diagonal(w, n, m_l, m_u);
  inst.m0 = marginal_mmd_matrix(n, m_l + m_u);
  inst.m = conditional_mmd_matrix(inst.source, inst.target);
  inst.target_y = inst.target.y_labeled;
  if (m_u > 0)
    inst.target_y.insert(inst.target_y.end(), inst.target.pseudo_labels->begin(),
                         inst.target.pseudo_labels->end());
  inst.y.resize(n + m_l + m_u);
  for (int i = 0; i < n; ++i) inst.y[i] = label_value(inst.source.y[i]);
  for (std::size_t j = 0; j < inst.target_y.size(); ++j)
    inst.y[n + static_cast<Eigen::Index>(j)] = label_value(inst.target_y[j]);
  return inst;
}

// --- criterion 1: closed-form optimality ----------------------------------

void criterion_closed_form() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  double worst_resid = 0.0;
  int perturbation_losses = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = random_instance(rng, 30);
    const WarHyperParams params;
    const Eigen::VectorXd alpha =
        solve_alpha(inst.k, inst.e, inst.m0, inst.m, inst.y, params);
    Eigen::MatrixXd system = (Eigen::MatrixXd(inst.e.asDiagonal()) +
                              params.lambda_p * inst.m0 +
                              params.lambda_q * inst.m) *
                             inst.k;
    system.diagonal().array() += params.sigma;
    const Eigen::VectorXd rhs = inst.e.cwiseProduct(inst.y);
    worst_resid =
        std::max(worst_resid, (system * alpha - rhs).norm() / rhs.norm());
    const double at_solution = objective_value(alpha, inst.k, inst.e, inst.m0,
                                               inst.m, inst.y, params);
    for (int p = 0; p < 100; ++p) {
      Eigen::VectorXd delta = oracles::random_matrix(rng, alpha.size(), 1);
      delta *= 1e-3 / delta.norm();
      if (objective_value(alpha + delta, inst.k, inst.e, inst.m0, inst.m,
                          inst.y, params) <
          at_solution - 1e-10 * (1.0 + std::abs(at_solution)))
        ++perturbation_losses;
    }
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::ostringstream detail;
  detail << "max residual/|Ey| = " << worst_resid << ", perturbation losses = "
         << perturbation_losses << "/10000, " << elapsed << " s";
  report(1, "closed-form optimality",
         worst_resid <= 1e-8 && perturbation_losses == 0 && elapsed < 5.0,
         detail.str());
}

// --- criterion 2: objective oracle equivalence ----------------------------

void criterion_objective_oracle() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Instance inst = random_instance(rng, 20);
    const Eigen::VectorXd alpha = oracles::random_matrix(rng, inst.y.size(), 1);
    const WarHyperParams params;
    const double via_library = objective_value(alpha, inst.k, inst.e, inst.m0,
                                               inst.m, inst.y, params);
    const double via_oracle = oracles::objective_brute_force(
        alpha, inst.k, inst.e, inst.y, inst.source.y, inst.target_y, params);
    worst = std::max(worst, std::abs(via_library - via_oracle));
  }
  std::ostringstream detail;
  detail << "max |objective - brute force| = " << worst;
  report(2, "objective oracle equivalence", worst <= 1e-9, detail.str());
}

// --- criterion 3: MMD invariants -------------------------------------------

void criterion_mmd_invariants() {
  std::mt19937_64 rng(303);
  bool ok = true;
  double worst_sum = 0.0, worst_eig = 0.0, worst_outer = 0.0, worst_entry = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 8);
    const int m_l = 1 + static_cast<int>(rng() % 4);
    const int m_u = static_cast<int>(rng() % 4);
    const int m = m_l + m_u;

    const Eigen::MatrixXd m0 = marginal_mmd_matrix(n, m);
    const Eigen::MatrixXd m0_online = marginal_mmd_matrix_online(n, m_l);
    Eigen::VectorXd a(n + m);
    a.head(n).setConstant(1.0 / n);
    a.tail(m).setConstant(-1.0 / m);
    worst_outer =
        std::max(worst_outer, (m0 - a * a.transpose()).cwiseAbs().maxCoeff());

    const SourceDomain source = oracles::random_source(rng, n, 2);
    const TargetState target = oracles::random_target(rng, m_l, m_u, 2, true);
    std::vector<Label> target_y = target.y_labeled;
    if (m_u > 0)
      target_y.insert(target_y.end(), target.pseudo_labels->begin(),
                      target.pseudo_labels->end());
    const auto factors =
        detail::conditional_mmd_factors(source.y, target_y, n, m);

    std::vector<Eigen::MatrixXd> matrices = {m0, m0_online};
    for (const auto& b : factors)
      if (b.size() > 0) matrices.push_back(b * b.transpose());
    for (const auto& mat : matrices) {
      ok = ok && (mat - mat.transpose()).cwiseAbs().maxCoeff() == 0.0;
      worst_sum = std::max(worst_sum, std::abs(mat.sum()));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mat);
      worst_eig = std::min(worst_eig, eig.eigenvalues().minCoeff());
    }

    // per-class blocks follow the 1/n_c^2, 1/m_c^2, -1/(n_c m_c) pattern
    const Label classes[2] = {Label::Target, Label::NonTarget};
    for (int c = 0; c < 2; ++c) {
      if (factors[c].size() == 0) continue;
      const Eigen::MatrixXd mc = factors[c] * factors[c].transpose();
      int n_c = 0, m_c = 0;
      for (const Label l : source.y) n_c += l == classes[c];
      for (const Label l : target_y) m_c += l == classes[c];
      for (int i = 0; i < n + m; ++i) {
        for (int j = 0; j < n + m; ++j) {
          const bool i_in = i < n ? source.y[i] == classes[c]
                                  : target_y[i - n] == classes[c];
          const bool j_in = j < n ? source.y[j] == classes[c]
                                  : target_y[j - n] == classes[c];
          double expected = 0.0;
          if (i_in && j_in) {
            if (i < n && j < n)
              expected = 1.0 / (double(n_c) * n_c);
            else if (i >= n && j >= n)
              expected = 1.0 / (double(m_c) * m_c);
            else
              expected = -1.0 / (double(n_c) * m_c);
          }
          worst_entry = std::max(worst_entry, std::abs(mc(i, j) - expected));
        }
      }
    }
  }
  std::ostringstream detail;
  detail << "max |entry sum| = " << worst_sum << ", min eigenvalue = "
         << worst_eig << ", outer-product error = " << worst_outer
         << ", block-formula error = " << worst_entry;
  report(3, "MMD invariants",
         ok && worst_sum <= 1e-9 && worst_eig >= -1e-10 &&
             worst_outer <= 1e-12 && worst_entry <= 1e-12,
         detail.str());
}

// --- criterion 4: ARRLS reduction ------------------------------------------

void criterion_arrls_reduction() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 6 + static_cast<int>(rng() % 10);
    const SourceDomain source = oracles::random_source(rng, n, 3);
    const TargetState target = oracles::random_target(
        rng, 2 + static_cast<int>(rng() % 3), static_cast<int>(rng() % 4), 3,
        true);
    const FusedClassifier arrls =
        baseline_arrls({source}, target, WarHyperParams{}, KernelSpec{});
    WarHyperParams uniform;
    uniform.w_t = 1.0;
    uniform.balance_classes = false;
    const KernelModel direct = fit_war(source, target, uniform, KernelSpec{});
    worst = std::max(worst, (arrls.members[0].model.alpha - direct.alpha)
                                .cwiseAbs()
                                .maxCoeff());
  }
  std::ostringstream detail;
  detail << "max coefficient difference = " << worst;
  report(4, "ARRLS reduction", worst <= 1e-12, detail.str());
}

// --- criterion 5: online/offline consistency -------------------------------

void criterion_online_offline() {
  std::mt19937_64 rng(505);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 14);
    const int m_l = 1 + static_cast<int>(rng() % 6);
    const SourceDomain source = oracles::random_source(rng, n, 3);
    const TargetState target = oracles::random_target(rng, m_l, 0, 3, false);
    WarHyperParams params;
    params.pseudo_iters = 1;
    const KernelModel offline = fit_war(source, target, params, KernelSpec{});
    const KernelModel online = fit_owar(source, target, params, KernelSpec{});
    worst = std::max(worst,
                     (offline.alpha - online.alpha).cwiseAbs().maxCoeff());
  }
  std::ostringstream detail;
  detail << "max coefficient difference = " << worst;
  report(5, "online/offline consistency", worst <= 1e-10, detail.str());
}

// --- criterion 6: SDS contiguity, determinism, retained fraction ------------

void criterion_sds() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> uniform(0.0, 5.0);
  bool contiguous = true, deterministic = true;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<DomainDistance> distances;
    const int z = 3 + static_cast<int>(rng() % 14);
    for (int i = 0; i < z; ++i)
      distances.push_back({"d" + std::to_string(i), uniform(rng)});
    const int k = 2 + static_cast<int>(rng() % 2);
    if (z < k) continue;
    const auto kept = select_sources(distances, k);
    deterministic = deterministic && kept == select_sources(distances, k);
    double max_kept = -1.0;
    double min_dropped = std::numeric_limits<double>::infinity();
    for (const auto& d : distances) {
      if (std::find(kept.begin(), kept.end(), d.source_id) != kept.end())
        max_kept = std::max(max_kept, d.distance);
      else
        min_dropped = std::min(min_dropped, d.distance);
    }
    contiguous = contiguous && max_kept <= min_dropped;
  }

  // retained fraction over 30 seeds of the default 13-source setup
  double fraction_total = 0.0;
  for (int s = 0; s < 30; ++s) {
    SynthConfig config;  // 14 domains, 270 samples, 34 targets
    config.seed = 1000 + static_cast<std::uint64_t>(s);
    const auto raw = synth_generate(config);
    std::vector<SourceDomain> sources;
    for (std::size_t z = 1; z < raw.size(); ++z) {
      const PcaBasis basis = pca_fit(raw[z].x, 20);
      SourceDomain processed;
      processed.id = raw[z].id;
      processed.x = minmax_normalize(pca_transform(basis, raw[z].x)).first;
      processed.y = raw[z].y;
      sources.push_back(std::move(processed));
    }
    const PcaBasis tbasis = pca_fit(raw[0].x, 20);
    const Eigen::MatrixXd tx =
        minmax_normalize(pca_transform(tbasis, raw[0].x)).first;
    const ClassMeans means = class_means(tx, raw[0].y);
    std::vector<DomainDistance> distances;
    for (const auto& source : sources)
      distances.push_back({source.id, domain_distance(source, means)});
    fraction_total +=
        static_cast<double>(select_sources(distances, 2).size()) / 13.0;
  }
  const double mean_fraction = fraction_total / 30.0;
  std::ostringstream detail;
  detail << "contiguous = " << contiguous << ", deterministic = "
         << deterministic << ", mean retained fraction = " << mean_fraction;
  report(6, "SDS contiguity and determinism",
         contiguous && deterministic && mean_fraction >= 0.25 &&
             mean_fraction <= 0.75,
         detail.str());
}

// --- criterion 7: synthetic learning-curve behavior -------------------------

void criterion_learning_curves() {
  const auto start = std::chrono::steady_clock::now();
  const int jobs = std::max(2u, std::thread::hardware_concurrency());

  ExperimentConfig offline;
  offline.mode = Mode::Offline;
  offline.algorithms = {Algorithm::WarSds, Algorithm::Arrls,
                        Algorithm::TargetOnly};
  offline.p = 5;
  offline.max_iterations = 5;
  offline.runs_per_subject = 10;
  offline.subjects_limit = 5;
  offline.seed = 20250811;
  const auto offline_results = simulate_offline(offline, jobs);

  ExperimentConfig online = offline;
  online.mode = Mode::Online;
  online.algorithms = {Algorithm::OwarSds};
  const auto online_results = simulate_online(online, jobs);

  auto mean_aupc = [](const std::vector<RunResult>& results, Algorithm a) {
    double total = 0.0;
    int count = 0;
    for (const auto& r : results)
      if (r.algorithm == a) {
        total += r.aupc;
        ++count;
      }
    return total / count;
  };
  double cold_start_total = 0.0;
  int cold_start_count = 0;
  for (const auto& r : offline_results)
    if (r.algorithm == Algorithm::WarSds) {
      cold_start_total += r.curve[0].bca;
      ++cold_start_count;
    }
  const double cold_start = cold_start_total / cold_start_count;
  const double war_aupc = mean_aupc(offline_results, Algorithm::WarSds);
  const double target_aupc = mean_aupc(offline_results, Algorithm::TargetOnly);
  const double arrls_aupc = mean_aupc(offline_results, Algorithm::Arrls);
  const double owar_aupc = mean_aupc(online_results, Algorithm::OwarSds);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  std::ostringstream detail;
  detail << "wARSDS m_l=0 BCA = " << cold_start << " (> 0.55), AUPC wARSDS = "
         << war_aupc << " vs TargetOnly = " << target_aupc << " vs ARRLS = "
         << arrls_aupc << " vs online OwARSDS = " << owar_aupc << ", "
         << elapsed << " s";
  report(7, "synthetic learning-curve behavior",
         cold_start > 0.55 && war_aupc >= target_aupc &&
             war_aupc >= arrls_aupc && war_aupc >= owar_aupc - 0.02 &&
             elapsed < 600.0,
         detail.str());
}

// --- criterion 8: metric unit values ----------------------------------------

void criterion_metrics() {
  auto labels = [](const std::string& s) {
    std::vector<Label> out;
    for (char c : s) out.push_back(c == 'T' ? Label::Target : Label::NonTarget);
    return out;
  };
  bool ok = true;
  ok = ok && bca(labels("TTNN"), labels("TTNN")) == 1.0;
  ok = ok && bca(labels("NNNN"), labels("TTNN")) == 0.5;
  ok = ok && bca(labels("NNNNNNNNNN"), labels("TTTNNNNNNN")) == 0.5;
  ok = ok &&
       std::abs(bca(labels("TTTNNNNNNN"), labels("TTTTNNNNNN")) - 0.875) == 0.0;
  ok = ok && aupc({{0, 1.0}, {5, 1.0}}) == 1.0;
  ok = ok && aupc({{0, 0.5}, {5, 0.5}, {10, 0.5}}) == 0.5;
  ok = ok && std::abs(aupc({{0, 0.5}, {5, 0.75}, {10, 1.0}}) - 0.75) < 1e-15;
  ok = ok && aupc({{0, 0.62}}) == 0.62;
  report(8, "metric unit values", ok, ok ? "all worked examples exact" : "mismatch");
}

// --- criterion 9: CLI determinism across worker counts ----------------------

void criterion_cli_determinism() {
#ifndef WARCAL_CLI_PATH
  report(9, "CLI determinism", false, "CLI path not configured");
#else
  const fs::path base = fs::temp_directory_path() / "warcal_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);

  ExperimentConfig config;
  config.mode = Mode::Offline;
  config.algorithms = {Algorithm::WarSds, Algorithm::TargetOnly};
  config.max_iterations = 3;
  config.runs_per_subject = 4;
  config.subjects_limit = 3;
  config.pca_components = 5;
  config.synth.n_domains = 6;
  config.synth.samples_per_domain = 80;
  config.synth.raw_dim = 8;
  config.synth.seed = 3;
  const fs::path config_path = base / "config.json";
  {
    std::ofstream out(config_path);
    out << config_to_json_text(config);
  }

  auto run = [&](int jobs, const fs::path& out_dir) {
    std::ostringstream cmd;
    cmd << '"' << WARCAL_CLI_PATH << '"' << " simulate --config " << config_path
        << " --seed 7 --jobs " << jobs << " --out " << out_dir
        << " > /dev/null";
    return std::system(cmd.str().c_str());
  };
  const int rc1 = run(1, base / "jobs1");
  const int rc8 = run(8, base / "jobs8");

  auto sorted_rows = [](const fs::path& file) {
    std::ifstream in(file);
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line)) rows.push_back(line);
    std::sort(rows.begin(), rows.end());
    return rows;
  };
  const auto rows1 = sorted_rows(base / "jobs1" / "curves.csv");
  const auto rows8 = sorted_rows(base / "jobs8" / "curves.csv");
  const bool ok = rc1 == 0 && rc8 == 0 && !rows1.empty() && rows1 == rows8;
  std::ostringstream detail;
  detail << "exit codes " << rc1 << "/" << rc8 << ", " << rows1.size()
         << " rows, byte-identical after sorting = " << (rows1 == rows8);
  report(9, "CLI determinism", ok, detail.str());
  fs::remove_all(base);
#endif
}

}  // namespace

int main() {
  criterion_closed_form();
  criterion_objective_oracle();
  criterion_mmd_invariants();
  criterion_arrls_reduction();
  criterion_online_offline();
  criterion_sds();
  criterion_learning_curves();
  criterion_metrics();
  criterion_cli_determinism();
  std::printf("ACCEPTANCE: %d/9 criteria passed\n", 9 - failures);
  return failures;
}
