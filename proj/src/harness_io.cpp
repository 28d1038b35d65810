#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "warcal/errors.hpp"
#include "warcal/harness.hpp"

namespace warcal {

using nlohmann::json;

std::string to_string(Mode mode) {
  return mode == Mode::Offline ? "offline" : "online";
}

Mode mode_from_string(const std::string& s) {
  if (s == "offline") return Mode::Offline;
  if (s == "online") return Mode::Online;
  throw ConfigError("unknown mode '" + s + "'");
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::War: return "wAR";
    case Algorithm::WarSds: return "wARSDS";
    case Algorithm::Owar: return "OwAR";
    case Algorithm::OwarSds: return "OwARSDS";
    case Algorithm::Arrls: return "ARRLS";
    case Algorithm::Tl: return "TL";
    case Algorithm::TlSds: return "TLSDS";
    case Algorithm::TargetOnly: return "TargetOnly";
    case Algorithm::OracleUpperBound: return "OracleUpperBound";
  }
  throw ConfigError("unknown algorithm value");
}

Algorithm algorithm_from_string(const std::string& s) {
  static const std::map<std::string, Algorithm> lookup = {
      {"wAR", Algorithm::War},          {"wARSDS", Algorithm::WarSds},
      {"OwAR", Algorithm::Owar},        {"OwARSDS", Algorithm::OwarSds},
      {"ARRLS", Algorithm::Arrls},      {"TL", Algorithm::Tl},
      {"TLSDS", Algorithm::TlSds},      {"TargetOnly", Algorithm::TargetOnly},
      {"OracleUpperBound", Algorithm::OracleUpperBound}};
  const auto it = lookup.find(s);
  if (it == lookup.end()) throw ConfigError("unknown algorithm '" + s + "'");
  return it->second;
}

void validate(const ExperimentConfig& config) {
  if (config.p < 1) throw ConfigError("p must be >= 1");
  if (config.max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (config.runs_per_subject < 1) throw ConfigError("runs_per_subject must be >= 1");
  if (config.subjects_limit < 0) throw ConfigError("subjects_limit must be >= 0");
  if (config.k < 1) throw ConfigError("k must be >= 1");
  if (config.pca_components < 1 || config.pca_components > config.synth.raw_dim)
    throw ConfigError("pca_components must be in [1, raw_dim]");
  if (config.params.w_t < 1.0) throw ConfigError("w_t must be >= 1");
  if (config.params.sigma < 0.0 || config.params.lambda_p < 0.0 ||
      config.params.lambda_q < 0.0)
    throw ConfigError("sigma and lambda weights must be >= 0");
  if (config.params.pseudo_iters < 1) throw ConfigError("pseudo_iters must be >= 1");
  if (config.kernel.kind == KernelKind::Rbf &&
      config.kernel.bandwidth == BandwidthMode::Fixed &&
      !(config.kernel.gamma > 0.0))
    throw ConfigError("fixed rbf gamma must be positive");
  if (config.synth.n_domains < 2 || config.synth.samples_per_domain < 2)
    throw ConfigError("generator needs >= 2 domains and >= 2 samples each");
  if (!(config.synth.target_fraction > 0.0 && config.synth.target_fraction < 0.5))
    throw ConfigError("target_fraction must lie in (0, 0.5)");
  for (Algorithm a : config.algorithms) {
    const bool pool_based = a == Algorithm::War || a == Algorithm::WarSds ||
                            a == Algorithm::Arrls;
    const bool label_only_solver = a == Algorithm::Owar || a == Algorithm::OwarSds;
    if (config.mode == Mode::Online && pool_based)
      throw ConfigError(to_string(a) + " needs the unlabeled pool; offline only");
    if (config.mode == Mode::Offline && label_only_solver)
      throw ConfigError(to_string(a) + " is the online path; use wAR/wARSDS offline");
  }
}

namespace {

std::string kernel_kind_name(KernelKind kind) {
  return kind == KernelKind::Linear ? "linear" : "rbf";
}

KernelKind kernel_kind_from(const std::string& s) {
  if (s == "linear") return KernelKind::Linear;
  if (s == "rbf") return KernelKind::Rbf;
  throw ConfigError("unknown kernel kind '" + s + "'");
}

std::string bandwidth_name(BandwidthMode mode) {
  return mode == BandwidthMode::Fixed ? "fixed" : "median";
}

BandwidthMode bandwidth_from(const std::string& s) {
  if (s == "fixed") return BandwidthMode::Fixed;
  if (s == "median") return BandwidthMode::MedianHeuristic;
  throw ConfigError("unknown bandwidth_mode '" + s + "'");
}

template <typename T>
void read_into(const json& j, const char* key, T& value) {
  if (j.contains(key)) value = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig config;
  try {
    if (j.contains("mode")) config.mode = mode_from_string(j.at("mode"));
    if (j.contains("algorithms")) {
      config.algorithms.clear();
      for (const auto& name : j.at("algorithms"))
        config.algorithms.push_back(algorithm_from_string(name));
    }
    read_into(j, "p", config.p);
    read_into(j, "max_iterations", config.max_iterations);
    read_into(j, "runs_per_subject", config.runs_per_subject);
    read_into(j, "subjects_limit", config.subjects_limit);
    read_into(j, "k", config.k);
    read_into(j, "pca_components", config.pca_components);
    read_into(j, "seed", config.seed);
    read_into(j, "output_dir", config.output_dir);
    if (j.contains("params")) {
      const json& p = j.at("params");
      read_into(p, "w_t", config.params.w_t);
      read_into(p, "sigma", config.params.sigma);
      read_into(p, "lambda_p", config.params.lambda_p);
      read_into(p, "lambda_q", config.params.lambda_q);
      read_into(p, "pseudo_iters", config.params.pseudo_iters);
      read_into(p, "balance_classes", config.params.balance_classes);
      read_into(p, "bca_fusion_weights", config.params.bca_fusion_weights);
    }
    if (j.contains("kernel")) {
      const json& k = j.at("kernel");
      if (k.contains("kind")) config.kernel.kind = kernel_kind_from(k.at("kind"));
      read_into(k, "gamma", config.kernel.gamma);
      if (k.contains("bandwidth_mode"))
        config.kernel.bandwidth = bandwidth_from(k.at("bandwidth_mode"));
    }
    if (j.contains("synth")) {
      const json& s = j.at("synth");
      read_into(s, "n_domains", config.synth.n_domains);
      read_into(s, "samples_per_domain", config.synth.samples_per_domain);
      read_into(s, "target_fraction", config.synth.target_fraction);
      read_into(s, "raw_dim", config.synth.raw_dim);
      read_into(s, "class_separation", config.synth.class_separation);
      read_into(s, "domain_shift_scale", config.synth.domain_shift_scale);
      read_into(s, "seed", config.synth.seed);
    }
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      read_into(s, "sigma_grid", config.sweep_sigma);
      read_into(s, "lambda_grid", config.sweep_lambda);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return config;
}

std::string config_to_json_text(const ExperimentConfig& config) {
  json algorithms = json::array();
  for (Algorithm a : config.algorithms) algorithms.push_back(to_string(a));
  json j = {
      {"mode", to_string(config.mode)},
      {"algorithms", algorithms},
      {"p", config.p},
      {"max_iterations", config.max_iterations},
      {"runs_per_subject", config.runs_per_subject},
      {"subjects_limit", config.subjects_limit},
      {"k", config.k},
      {"pca_components", config.pca_components},
      {"seed", config.seed},
      {"output_dir", config.output_dir},
      {"params",
       {{"w_t", config.params.w_t},
        {"sigma", config.params.sigma},
        {"lambda_p", config.params.lambda_p},
        {"lambda_q", config.params.lambda_q},
        {"pseudo_iters", config.params.pseudo_iters},
        {"balance_classes", config.params.balance_classes},
        {"bca_fusion_weights", config.params.bca_fusion_weights}}},
      {"kernel",
       {{"kind", kernel_kind_name(config.kernel.kind)},
        {"gamma", config.kernel.gamma},
        {"bandwidth_mode", bandwidth_name(config.kernel.bandwidth)}}},
      {"synth",
       {{"n_domains", config.synth.n_domains},
        {"samples_per_domain", config.synth.samples_per_domain},
        {"target_fraction", config.synth.target_fraction},
        {"raw_dim", config.synth.raw_dim},
        {"class_separation", config.synth.class_separation},
        {"domain_shift_scale", config.synth.domain_shift_scale},
        {"seed", config.synth.seed}}},
  };
  if (!config.sweep_sigma.empty() || !config.sweep_lambda.empty())
    j["sweep"] = {{"sigma_grid", config.sweep_sigma},
                  {"lambda_grid", config.sweep_lambda}};
  return j.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_json_text(text.str());
}

namespace detail {

std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v,
                                    std::chars_format::general, 17);
  return std::string(buf, result.ptr);
}

}  // namespace detail

void save_domain(const SourceDomain& domain, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write dataset file '" + path + "'");
  out << domain.id << ',' << domain.x.rows() << ',' << domain.x.cols() << '\n';
  for (Eigen::Index i = 0; i < domain.x.rows(); ++i) {
    out << label_char(domain.y[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < domain.x.cols(); ++j)
      out << ',' << detail::format_double(domain.x(i, j));
    out << '\n';
  }
  if (!out) throw ConfigError("failed writing dataset file '" + path + "'");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& s) {
  double value = 0.0;
  const auto result = std::from_chars(s.data(), s.data() + s.size(), value);
  if (result.ec != std::errc() || result.ptr != s.data() + s.size())
    throw ConfigError("bad numeric field '" + s + "'");
  return value;
}

}  // namespace

SourceDomain load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty dataset file");
  const auto header = split_csv_line(line);
  if (header.size() != 3) throw ConfigError("dataset header must be id,n,d");
  SourceDomain domain;
  domain.id = header[0];
  const int n = static_cast<int>(parse_double(header[1]));
  const int d = static_cast<int>(parse_double(header[2]));
  if (n < 1 || d < 1) throw ConfigError("bad dataset dimensions");
  domain.x.resize(n, d);
  domain.y.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw ConfigError("dataset file truncated at row " + std::to_string(i));
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != d + 1)
      throw ConfigError("dataset row " + std::to_string(i) + " has wrong arity");
    if (fields[0] != "T" && fields[0] != "N")
      throw ConfigError("dataset label must be T or N");
    domain.y.push_back(fields[0] == "T" ? Label::Target : Label::NonTarget);
    for (int j = 0; j < d; ++j)
      domain.x(i, j) = parse_double(fields[static_cast<std::size_t>(j) + 1]);
  }
  return domain;
}

namespace {

std::vector<const RunResult*> canonical_order(const std::vector<RunResult>& results) {
  std::vector<const RunResult*> ordered;
  ordered.reserve(results.size());
  for (const auto& r : results) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const RunResult* a, const RunResult* b) {
              const std::string an = to_string(a->algorithm);
              const std::string bn = to_string(b->algorithm);
              if (an != bn) return an < bn;
              if (a->subject_id != b->subject_id) return a->subject_id < b->subject_id;
              return a->run_index < b->run_index;
            });
  return ordered;
}

}  // namespace

void write_curves_csv(const std::vector<RunResult>& results, std::ostream& out) {
  out << "mode,algorithm,subject,run,m0,m_l,bca\n";
  for (const RunResult* r : canonical_order(results))
    for (const auto& point : r->curve)
      out << to_string(r->mode) << ',' << to_string(r->algorithm) << ','
          << r->subject_id << ',' << r->run_index << ',' << r->m0 << ','
          << point.labeled_count << ',' << detail::format_double(point.bca)
          << '\n';
}

void write_summary_csv(const std::vector<RunResult>& results, std::ostream& out) {
  out << "mode,algorithm,subject,run,aupc,retained_fraction,wall_time_s\n";
  for (const RunResult* r : canonical_order(results))
    out << to_string(r->mode) << ',' << to_string(r->algorithm) << ','
        << r->subject_id << ',' << r->run_index << ','
        << detail::format_double(r->aupc) << ','
        << detail::format_double(r->retained_fraction) << ','
        << detail::format_double(r->wall_time_s) << '\n';
}

void write_sweep_csv(const std::vector<SweepRow>& rows, Mode mode, std::ostream& out) {
  out << "mode,algorithm,sigma,lambda,m_l,mean_bca\n";
  std::vector<const SweepRow*> ordered;
  for (const auto& row : rows) ordered.push_back(&row);
  std::sort(ordered.begin(), ordered.end(),
            [](const SweepRow* a, const SweepRow* b) {
              if (a->sigma != b->sigma) return a->sigma < b->sigma;
              if (a->lambda != b->lambda) return a->lambda < b->lambda;
              const std::string an = to_string(a->algorithm);
              const std::string bn = to_string(b->algorithm);
              if (an != bn) return an < bn;
              return a->labeled_count < b->labeled_count;
            });
  for (const SweepRow* row : ordered)
    out << to_string(mode) << ',' << to_string(row->algorithm) << ','
        << detail::format_double(row->sigma) << ','
        << detail::format_double(row->lambda) << ',' << row->labeled_count
        << ',' << detail::format_double(row->mean_bca) << '\n';
}

std::string curves_mean_csv(std::istream& curves) {
  std::string line;
  if (!std::getline(curves, line) || line != "mode,algorithm,subject,run,m0,m_l,bca")
    throw ConfigError("unexpected curves.csv header");
  struct Cell {
    double sum = 0.0;
    double sum_sq = 0.0;
    int count = 0;
  };
  std::map<std::tuple<std::string, std::string, int>, Cell> cells;
  while (std::getline(curves, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 7) throw ConfigError("bad curves.csv row: " + line);
    const double value = parse_double(fields[6]);
    Cell& cell = cells[{fields[0], fields[1],
                        static_cast<int>(parse_double(fields[5]))}];
    cell.sum += value;
    cell.sum_sq += value * value;
    ++cell.count;
  }
  std::ostringstream out;
  out << "mode,algorithm,m_l,mean_bca,std_bca,count\n";
  for (const auto& [key, cell] : cells) {
    const double mean = cell.sum / cell.count;
    const double var = cell.count > 1
                           ? std::max(0.0, (cell.sum_sq - cell.count * mean * mean) /
                                               (cell.count - 1))
                           : 0.0;
    out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key)
        << ',' << detail::format_double(mean) << ','
        << detail::format_double(std::sqrt(var)) << ',' << cell.count << '\n';
  }
  return out.str();
}

std::string summary_mean_csv(std::istream& summary) {
  std::string line;
  if (!std::getline(summary, line) ||
      line != "mode,algorithm,subject,run,aupc,retained_fraction,wall_time_s")
    throw ConfigError("unexpected summary.csv header");
  struct Cell {
    double aupc_sum = 0.0;
    double aupc_sq = 0.0;
    double retained_sum = 0.0;
    double time_sum = 0.0;
    int count = 0;
  };
  std::map<std::pair<std::string, std::string>, Cell> cells;
  while (std::getline(summary, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 7) throw ConfigError("bad summary.csv row: " + line);
    Cell& cell = cells[{fields[0], fields[1]}];
    const double aupc_value = parse_double(fields[4]);
    cell.aupc_sum += aupc_value;
    cell.aupc_sq += aupc_value * aupc_value;
    cell.retained_sum += parse_double(fields[5]);
    cell.time_sum += parse_double(fields[6]);
    ++cell.count;
  }
  std::ostringstream out;
  out << "# TargetOnly and OracleUpperBound are closed-form weighted RLS "
         "classifiers; no cross-validated model selection is performed.\n";
  out << "mode,algorithm,mean_aupc,std_aupc,mean_retained_fraction,mean_wall_time_s,count\n";
  for (const auto& [key, cell] : cells) {
    const double mean = cell.aupc_sum / cell.count;
    const double var = cell.count > 1
                           ? std::max(0.0, (cell.aupc_sq - cell.count * mean * mean) /
                                               (cell.count - 1))
                           : 0.0;
    out << key.first << ',' << key.second << ',' << detail::format_double(mean)
        << ',' << detail::format_double(std::sqrt(var)) << ','
        << detail::format_double(cell.retained_sum / cell.count) << ','
        << detail::format_double(cell.time_sum / cell.count) << ',' << cell.count
        << '\n';
  }
  return out.str();
}

}  // namespace warcal
