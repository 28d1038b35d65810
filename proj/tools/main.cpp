#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "warcal/errors.hpp"
#include "warcal/features.hpp"
#include "warcal/harness.hpp"
#include "warcal/rng.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string mode;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "Experiment config (JSON)");
  cmd->add_option("--seed", opts.seed, "Override the config seed")
      ->each([&](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--mode", opts.mode, "offline or online")
      ->check(CLI::IsMember({"offline", "online"}));
  cmd->add_option("--out", opts.out_dir, "Output directory");
  cmd->add_option("--jobs", opts.jobs, "Worker threads")
      ->check(CLI::PositiveNumber);
}

warcal::ExperimentConfig resolve_config(const CommonOpts& opts) {
  warcal::ExperimentConfig config;
  if (!opts.config_path.empty()) config = warcal::load_config(opts.config_path);
  if (opts.seed_set) config.seed = opts.seed;
  if (!opts.mode.empty()) config.mode = warcal::mode_from_string(opts.mode);
  if (!opts.out_dir.empty()) config.output_dir = opts.out_dir;
  return config;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw warcal::ConfigError("cannot write '" + path.string() + "'");
  out << content;
}

int run_gen_data(const CommonOpts& opts) {
  warcal::ExperimentConfig config = resolve_config(opts);
  if (config.synth.seed == 0)
    config.synth.seed = warcal::mix_seed(config.seed, 0xDA7AULL);
  const auto domains = warcal::synth_generate(config.synth);
  fs::create_directories(config.output_dir);
  for (const auto& domain : domains) {
    const fs::path path = fs::path(config.output_dir) / (domain.id + ".csv");
    warcal::save_domain(domain, path.string());
    std::cout << path.string() << '\n';
  }
  std::cout << "wrote " << domains.size() << " domains\n";
  return 0;
}

int run_simulate(const CommonOpts& opts) {
  const warcal::ExperimentConfig config = resolve_config(opts);
  const auto results = warcal::simulate(config, opts.jobs);
  fs::create_directories(config.output_dir);
  {
    std::ofstream out(fs::path(config.output_dir) / "curves.csv");
    warcal::write_curves_csv(results, out);
  }
  {
    std::ofstream out(fs::path(config.output_dir) / "summary.csv");
    warcal::write_summary_csv(results, out);
  }
  std::cout << "wrote " << results.size() << " run results to "
            << config.output_dir << '\n';
  return 0;
}

int run_sweep(const CommonOpts& opts) {
  const warcal::ExperimentConfig config = resolve_config(opts);
  if (config.sweep_sigma.empty() && config.sweep_lambda.empty())
    throw warcal::ConfigError(
        "sweep needs a 'sweep' section with sigma_grid and/or lambda_grid");
  const auto rows = warcal::sensitivity_sweep(config, config.sweep_sigma,
                                              config.sweep_lambda, opts.jobs);
  fs::create_directories(config.output_dir);
  std::ofstream out(fs::path(config.output_dir) / "sweep.csv");
  warcal::write_sweep_csv(rows, config.mode, out);
  std::cout << "wrote " << rows.size() << " sweep rows to "
            << config.output_dir << "/sweep.csv\n";
  return 0;
}

int run_report(const CommonOpts& opts) {
  const warcal::ExperimentConfig config = resolve_config(opts);
  const fs::path dir = config.output_dir;
  {
    std::ifstream curves(dir / "curves.csv");
    if (!curves)
      throw warcal::ConfigError("no curves.csv in '" + dir.string() + "'");
    write_file(dir / "curves_mean.csv", warcal::curves_mean_csv(curves));
  }
  {
    std::ifstream summary(dir / "summary.csv");
    if (!summary)
      throw warcal::ConfigError("no summary.csv in '" + dir.string() + "'");
    const std::string aggregated = warcal::summary_mean_csv(summary);
    write_file(dir / "summary_mean.csv", aggregated);
    std::cout << aggregated;
  }
  std::cout << "wrote curves_mean.csv and summary_mean.csv to " << dir.string()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"warcal: weighted adaptation regularization calibration toolkit"};
  app.require_subcommand(1);

  CommonOpts gen_opts, sim_opts, sweep_opts, report_opts;
  CLI::App* gen = app.add_subcommand("gen-data", "Write a synthetic dataset");
  add_common(gen, gen_opts);
  CLI::App* sim = app.add_subcommand("simulate", "Run a calibration simulation");
  add_common(sim, sim_opts);
  CLI::App* sweep = app.add_subcommand("sweep", "Parameter sensitivity sweep");
  add_common(sweep, sweep_opts);
  CLI::App* report = app.add_subcommand("report", "Aggregate result CSVs");
  add_common(report, report_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_gen_data(gen_opts);
    if (sim->parsed()) return run_simulate(sim_opts);
    if (sweep->parsed()) return run_sweep(sweep_opts);
    if (report->parsed()) return run_report(report_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
