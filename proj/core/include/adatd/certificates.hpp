#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "adatd/constants.hpp"
#include "adatd/features.hpp"
#include "adatd/mdp.hpp"

namespace adatd {

struct DescentReport {
  bool passed = false;
  double min_ratio = 0.0;   // min over trials of <theta*-theta, g> / ||theta*-theta||^2
  double threshold = 0.0;   // (1 - alpha) omega
  double slack = 0.0;       // min_ratio - threshold
  int n_trials = 0;
  Eigen::VectorXd worst_theta;
};

// Samples n_trials points uniformly in the radius ball and checks the
// curvature inequality <theta* - theta, g^lam(theta)> >= (1-alpha) omega
// ||theta - theta*||^2 with slack tolerance -1e-9 on the ratio.
DescentReport descent_certificate(const Mdp& mdp, const FeatureMap& features,
                                  const Eigen::VectorXd& pi, double lam,
                                  int n_trials, std::uint64_t seed,
                                  double radius);

struct BiasReport {
  bool passed = false;           // against kappa_bar (B + R gamma + R) rho^K0
  bool passed_state_scaled = false;  // against the |S|-scaled constant
  double max_bias = 0.0;         // worst start state
  double bound = 0.0;
  double bound_state_scaled = 0.0;
  int worst_start = -1;
  int window = 0;                // K0
};

// Enumerates the delayed-start bias exactly: the law of s_{K0} given s_0 is
// the s_0 row of P^K0, so for every start state
//   || Phi^T (Diag(P^K0 row) - Diag(pi)) (T Phi theta - Phi theta) ||
// must stay within kappa rho^K0.
BiasReport bias_certificate(const Mdp& mdp, const FeatureMap& features,
                            const Eigen::VectorXd& pi,
                            const Eigen::VectorXd& theta, int window,
                            const TheoryConstants& constants);

}  // namespace adatd
