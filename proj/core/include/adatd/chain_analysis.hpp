#pragma once

#include <Eigen/Dense>

#include "adatd/features.hpp"
#include "adatd/mdp.hpp"

namespace adatd {

// Structure checks used by stationary_distribution's preconditions.
bool is_irreducible(const Eigen::MatrixXd& transition);
bool is_aperiodic(const Eigen::MatrixXd& transition);

// Unique pi with pi.P = pi, pi > 0. Throws if the chain is reducible or
// periodic, naming the failing check.
Eigen::VectorXd stationary_distribution(const Mdp& mdp);

// Second-largest eigenvalue modulus of P; values below 1e-13 snap to 0.
double mixing_rate(const Mdp& mdp);

// Smallest kappa_bar with sup_s sum_s' |P^t(s'|s) - pi(s')| <= kappa_bar *
// rho^t for all t in 1..horizon. Distances at the float noise floor (1e-14)
// count as fully mixed and contribute nothing.
double fit_kappa_bar(const Mdp& mdp, const Eigen::VectorXd& pi, double rho,
                     int horizon);

// Smallest non-negative integer t with kappa_bar * rho^t <= eps.
int mixing_time(double kappa_bar, double rho, double eps);

// omega = lambda_min(Phi^T Diag(pi) Phi). Throws on rank-deficient Phi.
double feature_gram_omega(const Mdp& mdp, const FeatureMap& features,
                          const Eigen::VectorXd& pi);

struct ChainDiagnostics {
  Eigen::VectorXd pi;
  double rho = 0.0;
  double kappa_bar = 0.0;
  double omega = 0.0;
  int fit_horizon = 0;
};

// Default window for the kappa_bar fit: 10 * ceil(1 / (1 - rho)).
int default_fit_horizon(double rho);

// Full diagnostic bundle. fit_horizon <= 0 selects the default window.
ChainDiagnostics analyze_chain(const Mdp& mdp, const FeatureMap& features,
                               int fit_horizon = 0);

}  // namespace adatd
