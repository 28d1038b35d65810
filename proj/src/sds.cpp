#include "warcal/sds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "warcal/errors.hpp"

namespace warcal {

ClassMeans class_means(const Eigen::MatrixXd& x, const std::vector<Label>& y) {
  const int n = static_cast<int>(y.size());
  if (x.rows() != n) throw DimensionMismatch("rows and labels disagree");
  if (n == 0) throw MissingClassError("no samples");
  ClassMeans means;
  means.target_mean = Eigen::VectorXd::Zero(x.cols());
  means.nontarget_mean = Eigen::VectorXd::Zero(x.cols());
  int count_t = 0;
  int count_n = 0;
  for (int i = 0; i < n; ++i) {
    if (y[i] == Label::Target) {
      means.target_mean += x.row(i).transpose();
      ++count_t;
    } else {
      means.nontarget_mean += x.row(i).transpose();
      ++count_n;
    }
  }
  if (count_t == 0 || count_n == 0)
    throw MissingClassError("a class has no samples; means undefined");
  means.target_mean /= count_t;
  means.nontarget_mean /= count_n;
  return means;
}

double domain_distance(const SourceDomain& source, const ClassMeans& target_means) {
  if (source.x.cols() != target_means.target_mean.size())
    throw DimensionMismatch("feature dimensions disagree");
  const ClassMeans source_means = class_means(source.x, source.y);
  return (source_means.target_mean - target_means.target_mean).norm() +
         (source_means.nontarget_mean - target_means.nontarget_mean).norm();
}

Kmeans1dResult kmeans_1d(const std::vector<double>& values, int k) {
  const int n = static_cast<int>(values.size());
  if (k < 1) throw InvalidInput("cluster count must be positive");
  if (n < k) throw TooFewValues("fewer values than clusters");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] < values[b]; });
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = values[order[i]];

  std::vector<double> s(n + 1, 0.0);
  std::vector<double> ss(n + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    s[i + 1] = s[i] + v[i];
    ss[i + 1] = ss[i] + v[i] * v[i];
  }
  // Within-cluster sum of squares of v[i..j].
  auto cost = [&](int i, int j) {
    const int len = j - i + 1;
    const double sum = s[j + 1] - s[i];
    return std::max(0.0, ss[j + 1] - ss[i] - sum * sum / len);
  };

  const double inf = std::numeric_limits<double>::infinity();
  // best[c][i]: optimal cost of splitting v[0..i] into c+1 clusters.
  std::vector<std::vector<double>> best(k, std::vector<double>(n, inf));
  std::vector<std::vector<int>> from(k, std::vector<int>(n, -1));
  for (int i = 0; i < n; ++i) best[0][i] = cost(0, i);
  for (int c = 1; c < k; ++c) {
    for (int i = c; i < n; ++i) {
      for (int split = c - 1; split < i; ++split) {
        const double total = best[c - 1][split] + cost(split + 1, i);
        // <= keeps the latest split on ties, so tied boundary values fall
        // into the smaller cluster index.
        if (total <= best[c][i]) {
          best[c][i] = total;
          from[c][i] = split;
        }
      }
    }
  }

  std::vector<int> bounds(k + 1);  // cluster c covers [bounds[c], bounds[c+1])
  bounds[k] = n;
  int end = n - 1;
  for (int c = k - 1; c >= 1; --c) {
    const int split = from[c][end];
    bounds[c] = split + 1;
    end = split;
  }
  bounds[0] = 0;

  Kmeans1dResult result;
  result.assignment.assign(n, 0);
  result.centroids.resize(k);
  for (int c = 0; c < k; ++c) {
    const int len = bounds[c + 1] - bounds[c];
    result.centroids[c] = (s[bounds[c + 1]] - s[bounds[c]]) / len;
    for (int i = bounds[c]; i < bounds[c + 1]; ++i)
      result.assignment[order[i]] = c;
  }
  return result;
}

std::vector<std::string> select_sources(const std::vector<DomainDistance>& distances,
                                        int k) {
  const int n = static_cast<int>(distances.size());
  if (n == 0) throw TooFewDomains("no source domains");
  if (n < k) throw TooFewDomains("fewer domains than clusters");
  std::vector<std::string> retained;
  if (k <= 1) {
    for (const auto& d : distances) retained.push_back(d.source_id);
    return retained;
  }
  std::vector<double> values;
  values.reserve(distances.size());
  for (const auto& d : distances) values.push_back(d.distance);
  const Kmeans1dResult clusters = kmeans_1d(values, k);
  for (int i = 0; i < n; ++i)
    if (clusters.assignment[i] == 0) retained.push_back(distances[i].source_id);
  return retained;
}

}  // namespace warcal
