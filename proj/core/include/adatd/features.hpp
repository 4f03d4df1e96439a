#pragma once

#include <Eigen/Dense>
#include <vector>

namespace adatd {

// Full column rank means smallest singular value above this.
inline constexpr double kRankTol = 1e-10;

// Feature matrix Phi, one row per state.
struct FeatureMap {
  Eigen::MatrixXd phi;  // |S| x d

  int n_states() const { return static_cast<int>(phi.rows()); }
  int dim() const { return static_cast<int>(phi.cols()); }
  Eigen::VectorXd row(int s) const { return phi.row(s).transpose(); }

  // Checks ||phi(s)|| <= 1 for every s and full column rank.
  void validate() const;

  static FeatureMap tabular(int n_states);
};

// Partition of {0, ..., n_states-1} into disjoint non-empty clusters.
struct AggregationScheme {
  std::vector<std::vector<int>> clusters;

  int n_clusters() const { return static_cast<int>(clusters.size()); }
  void validate(int n_states) const;

  // Clusters of near-equal size over contiguous state ranges.
  static AggregationScheme contiguous(int n_states, int n_clusters);
};

// One-hot features: phi(s)[j] = 1 iff s is in cluster j.
FeatureMap aggregation_features(int n_states, const AggregationScheme& scheme);

}  // namespace adatd
