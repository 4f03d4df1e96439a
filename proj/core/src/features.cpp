#include "adatd/features.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace adatd {

void FeatureMap::validate() const {
  if (phi.rows() < 1 || phi.cols() < 1)
    throw std::invalid_argument("features: empty feature matrix");

  for (int s = 0; s < n_states(); ++s) {
    const double norm = phi.row(s).norm();
    if (norm > 1.0 + 1e-12) {
      std::ostringstream msg;
      msg << "features: ||phi(" << s << ")|| = " << norm
          << " exceeds 1 (feature rows must lie in the unit ball)";
      throw std::invalid_argument(msg.str());
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi);
  const double sigma_min = svd.singularValues().minCoeff();
  if (!(sigma_min > kRankTol)) {
    std::ostringstream msg;
    msg << "features: smallest singular value " << sigma_min
        << " <= " << kRankTol << "; Phi must be full column rank";
    throw std::invalid_argument(msg.str());
  }
}

FeatureMap FeatureMap::tabular(int n_states) {
  FeatureMap f;
  f.phi = Eigen::MatrixXd::Identity(n_states, n_states);
  return f;
}

void AggregationScheme::validate(int n_states) const {
  if (clusters.empty())
    throw std::invalid_argument("aggregation: no clusters given");

  std::vector<int> owner(n_states, -1);
  for (int j = 0; j < n_clusters(); ++j) {
    if (clusters[j].empty()) {
      std::ostringstream msg;
      msg << "aggregation: cluster " << j << " is empty";
      throw std::invalid_argument(msg.str());
    }
    for (int s : clusters[j]) {
      if (s < 0 || s >= n_states) {
        std::ostringstream msg;
        msg << "aggregation: state " << s << " out of range in cluster " << j;
        throw std::invalid_argument(msg.str());
      }
      if (owner[s] != -1) {
        std::ostringstream msg;
        msg << "aggregation: state " << s << " appears in clusters "
            << owner[s] << " and " << j;
        throw std::invalid_argument(msg.str());
      }
      owner[s] = j;
    }
  }
  for (int s = 0; s < n_states; ++s) {
    if (owner[s] == -1) {
      std::ostringstream msg;
      msg << "aggregation: state " << s << " not covered by any cluster";
      throw std::invalid_argument(msg.str());
    }
  }
}

AggregationScheme AggregationScheme::contiguous(int n_states, int n_clusters) {
  if (n_clusters < 1 || n_clusters > n_states)
    throw std::invalid_argument("aggregation: need 1 <= clusters <= states");
  AggregationScheme scheme;
  scheme.clusters.resize(n_clusters);
  for (int j = 0; j < n_clusters; ++j) {
    const int lo = static_cast<int>(static_cast<long>(j) * n_states / n_clusters);
    const int hi =
        static_cast<int>(static_cast<long>(j + 1) * n_states / n_clusters);
    for (int s = lo; s < hi; ++s) scheme.clusters[j].push_back(s);
  }
  return scheme;
}

FeatureMap aggregation_features(int n_states, const AggregationScheme& scheme) {
  scheme.validate(n_states);
  FeatureMap f;
  f.phi = Eigen::MatrixXd::Zero(n_states, scheme.n_clusters());
  for (int j = 0; j < scheme.n_clusters(); ++j)
    for (int s : scheme.clusters[j]) f.phi(s, j) = 1.0;
  return f;
}

}  // namespace adatd
