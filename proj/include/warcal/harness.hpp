#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "warcal/adapt_offline.hpp"
#include "warcal/dataset.hpp"
#include "warcal/features.hpp"
#include "warcal/kernel.hpp"

namespace warcal {

enum class Mode { Offline, Online };

enum class Algorithm {
  War,
  WarSds,
  Owar,
  OwarSds,
  Arrls,
  Tl,
  TlSds,
  TargetOnly,
  OracleUpperBound,
};

std::string to_string(Mode mode);
std::string to_string(Algorithm algorithm);
Mode mode_from_string(const std::string& s);
Algorithm algorithm_from_string(const std::string& s);

struct ExperimentConfig {
  Mode mode = Mode::Offline;
  std::vector<Algorithm> algorithms;  // empty -> every algorithm valid for mode
  int p = 5;                  // labels acquired per iteration
  int max_iterations = 6;     // curve points per run (iteration 0 has m_l = 0)
  int runs_per_subject = 30;  // random starting positions per held-out subject
  int subjects_limit = 0;     // 0 = every domain takes a turn as the target
  int k = 2;                  // source-selection cluster count
  int pca_components = 20;
  WarHyperParams params;
  KernelSpec kernel;
  SynthConfig synth;  // synth.seed = 0 derives the data seed from `seed`
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  // Optional sensitivity grids for the sweep command; empty = {current}.
  std::vector<double> sweep_sigma;
  std::vector<double> sweep_lambda;
};

// Throws ConfigError on invalid values or a mode/algorithm mismatch
// (pool-based algorithms are offline-only; the label-only solvers are
// online-only).
void validate(const ExperimentConfig& config);

struct CurvePoint {
  int labeled_count = 0;
  double bca = 0.0;
};

// One simulation run's learning curve for one algorithm.
struct RunResult {
  Mode mode = Mode::Offline;
  Algorithm algorithm = Algorithm::WarSds;
  std::string subject_id;
  int run_index = 0;
  int m0 = 1;  // 1-based starting position in the target sequence
  std::vector<CurvePoint> curve;
  double aupc = 0.0;
  double retained_fraction = 1.0;  // mean retained/total source domains
  double wall_time_s = 0.0;
};

// Balanced classification accuracy: mean of the per-class accuracies.
// Throws MissingClassError when the truth lacks a class.
double bca(const std::vector<Label>& predicted, const std::vector<Label>& truth);

// Normalized area under the curve: trapezoidal area over the iteration
// index divided by the number of intervals; a single point returns its
// own value.
double aupc(const std::vector<CurvePoint>& curve);

// Leave-one-subject-out calibration simulation on synthetic domains.
// (subject, run) pairs are independent and distributed over `jobs`
// workers; results are identical for any worker count.
std::vector<RunResult> simulate(const ExperimentConfig& config, int jobs = 1);
std::vector<RunResult> simulate_offline(const ExperimentConfig& config, int jobs = 1);
std::vector<RunResult> simulate_online(const ExperimentConfig& config, int jobs = 1);

struct SweepRow {
  double sigma = 0.0;
  double lambda = 0.0;  // lambda_p = lambda_q
  Algorithm algorithm = Algorithm::WarSds;
  int labeled_count = 0;
  double mean_bca = 0.0;
};

// One full simulate per (sigma, lambda) grid point with shared seeds;
// reports the mean BCA across subjects and runs at each labeled count.
std::vector<SweepRow> sensitivity_sweep(const ExperimentConfig& config,
                                        const std::vector<double>& sigma_grid,
                                        const std::vector<double>& lambda_grid,
                                        int jobs = 1);

// --- persistence ---------------------------------------------------------

ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& config);

// One file per domain: header `id,n,d`, then n rows `label,f1,...,fd`
// with label T or N and floats at 17 significant digits.
void save_domain(const SourceDomain& domain, const std::string& path);
SourceDomain load_domain(const std::string& path);

void write_curves_csv(const std::vector<RunResult>& results, std::ostream& out);
void write_summary_csv(const std::vector<RunResult>& results, std::ostream& out);
void write_sweep_csv(const std::vector<SweepRow>& rows, Mode mode, std::ostream& out);

// Aggregates a curves.csv stream into per-(algorithm, labeled count) mean
// and standard deviation rows.
std::string curves_mean_csv(std::istream& curves);
// Aggregates a summary.csv stream into per-algorithm means.
std::string summary_mean_csv(std::istream& summary);

namespace detail {

// Labeled positions after `count` sequential acquisitions starting at the
// 1-based position m0, wrapping past the end of the sequence. 0-based,
// in acquisition order.
std::vector<int> labeled_indices(int m0, int m, int count);

// Online target pipeline: basis and normalization fitted on the labeled
// rows when there are enough of them (> n_components), otherwise on the
// pooled source rows.
std::pair<PcaBasis, MinMaxStats> online_target_pipeline(
    const Eigen::MatrixXd& target_raw, const std::vector<int>& labeled_idx,
    const Eigen::MatrixXd& pooled_source_raw, int n_components);

std::string format_double(double v);  // 17 significant digits

}  // namespace detail

}  // namespace warcal
