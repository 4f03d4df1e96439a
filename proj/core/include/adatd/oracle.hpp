#pragma once

#include <Eigen/Dense>

#include "adatd/chain_analysis.hpp"
#include "adatd/features.hpp"
#include "adatd/mdp.hpp"

namespace adatd {

// Direct solves abort above this condition number.
inline constexpr double kConditionLimit = 1e12;

// (T V)(s) = R(s) + gamma * sum_s' P(s'|s) V(s').
Eigen::VectorXd bellman_apply(const Mdp& mdp, const Eigen::VectorXd& v);

// V = (I - gamma P)^-1 R, the unique Bellman fixed point.
Eigen::VectorXd true_value_function(const Mdp& mdp);

// g(theta) = Phi^T Diag(pi) (T Phi theta - Phi theta), the stationary
// expectation of the semi-gradient.
Eigen::VectorXd limiting_direction(const Mdp& mdp, const FeatureMap& features,
                                   const Eigen::VectorXd& pi,
                                   const Eigen::VectorXd& theta);

// sqrt(sum_s pi(s) v(s)^2).
double pi_norm(const Eigen::VectorXd& pi, const Eigen::VectorXd& v);

struct FixedPoint {
  Eigen::VectorXd theta_star;
  double lam = 0.0;
  double residual = 0.0;        // ||g^lambda(theta_star)||
  Eigen::VectorXd value_vector; // Phi theta_star
  double condition = 0.0;       // condition number of the solved system
};

// Solves Phi^T Diag(pi) (I - gamma P) Phi theta = Phi^T Diag(pi) R.
FixedPoint fixed_point_td0(const Mdp& mdp, const FeatureMap& features,
                           const Eigen::VectorXd& pi);

// Truncation length with lam^m <= 1e-14 (0 for lam = 0).
int lambda_series_length(double lam);

// Truncated evaluation of the lambda-averaged Bellman operator
//   (T^lam V)(s) = (1-lam) sum_m lam^m E[sum_{t<=m} gamma^t R(s_t)
//                                       + gamma^{m+1} V(s_{m+1}) | s_0 = s]
// via matrix powers. Requires lam in [0, 1); equals bellman_apply at lam = 0.
Eigen::VectorXd lambda_bellman_apply(const Mdp& mdp, const Eigen::VectorXd& v,
                                     double lam, int m_max);

// Affine closed form of T^lam: (T^lam V) = offset + multi * V with
// multi = (1-lam) gamma P (I - lam gamma P)^-1. Valid for lam in [0, 1];
// at lam = 1 the operator degenerates to the constant V_mu.
struct LambdaBellmanForm {
  Eigen::VectorXd offset;
  Eigen::MatrixXd multi;
};
LambdaBellmanForm lambda_bellman_closed_form(const Mdp& mdp, double lam);

// g^lam(theta) = Phi^T Diag(pi) (T^lam Phi theta - Phi theta), evaluated via
// the closed form.
Eigen::VectorXd lambda_limiting_direction(const Mdp& mdp,
                                          const FeatureMap& features,
                                          const Eigen::VectorXd& pi,
                                          double lam,
                                          const Eigen::VectorXd& theta);

// Zero of g^lam. At lam = 0 coincides with fixed_point_td0; at lam = 1 the
// system degenerates to the pi-norm projection of V_mu onto span(Phi). The
// residual is evaluated through the truncated series for lam < 1 and through
// the projection normal equations at lam = 1.
FixedPoint fixed_point_td_lambda(const Mdp& mdp, const FeatureMap& features,
                                 const Eigen::VectorXd& pi, double lam);

// Value-approximation gap and its contraction bound:
//   lhs = ||Phi theta*_lam - V_mu||_pi
//   rhs = ||Proj_Phi(V_mu) - V_mu||_pi / sqrt(1 - alpha^2),
// with alpha = gamma (1-lam) / (1 - gamma lam).
struct ApproximationGap {
  double lhs = 0.0;
  double rhs = 0.0;
};
ApproximationGap approximation_gap(const Mdp& mdp, const FeatureMap& features,
                                   const Eigen::VectorXd& pi, double lam);

// Effective contraction modulus alpha = gamma (1-lam) / (1 - gamma lam).
double lambda_contraction_modulus(double gamma, double lam);

}  // namespace adatd
