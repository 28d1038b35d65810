#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "warcal/dataset.hpp"

namespace warcal {

struct ClassMeans {
  Eigen::VectorXd target_mean;     // mean feature vector of Target rows
  Eigen::VectorXd nontarget_mean;  // mean feature vector of NonTarget rows
};

// Arithmetic mean of the rows of each class. Throws MissingClassError if
// either class is empty.
ClassMeans class_means(const Eigen::MatrixXd& x, const std::vector<Label>& y);

// Sum over both classes of the Euclidean distance between the source
// domain's class mean and the target's class mean.
double domain_distance(const SourceDomain& source, const ClassMeans& target_means);

struct DomainDistance {
  std::string source_id;
  double distance = 0.0;
};

struct Kmeans1dResult {
  // Cluster index per input value; clusters are numbered by ascending
  // centroid, so cluster 0 holds the smallest values.
  std::vector<int> assignment;
  std::vector<double> centroids;
};

// Globally optimal 1-D k-means via dynamic programming over the sorted
// values (optimal partitions are contiguous in sorted order). When several
// partitions tie, boundary values go to the smaller cluster index.
Kmeans1dResult kmeans_1d(const std::vector<double>& values, int k);

// Ids whose distance falls in the smallest-centroid cluster; with k = 1
// every id is retained. Input order is preserved. Throws TooFewDomains
// when fewer than k distances are given.
std::vector<std::string> select_sources(const std::vector<DomainDistance>& distances,
                                        int k);

}  // namespace warcal
