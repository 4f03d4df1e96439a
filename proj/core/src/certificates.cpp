#include "adatd/certificates.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "adatd/chain_analysis.hpp"
#include "adatd/oracle.hpp"
#include "adatd/rng.hpp"

namespace adatd {

namespace {

// Uniform draw from the radius ball: gaussian direction, radial cdf inverse.
Eigen::VectorXd sample_in_ball(Rng& rng, int dim, double radius) {
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x(i) = rng.normal();
  const double norm = x.norm();
  if (norm < 1e-300) return Eigen::VectorXd::Zero(dim);
  const double r =
      radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(dim));
  return x * (r / norm);
}

}  // namespace

DescentReport descent_certificate(const Mdp& mdp, const FeatureMap& features,
                                  const Eigen::VectorXd& pi, double lam,
                                  int n_trials, std::uint64_t seed,
                                  double radius) {
  if (n_trials < 1)
    throw std::invalid_argument("descent_certificate: n_trials >= 1");

  const double omega = feature_gram_omega(mdp, features, pi);
  const double alpha = lambda_contraction_modulus(mdp.discount, lam);
  const FixedPoint fp = fixed_point_td_lambda(mdp, features, pi, lam);

  // g^lam(theta) = b - A theta from the affine closed form; precompute once.
  const LambdaBellmanForm form = lambda_bellman_closed_form(mdp, lam);
  const Eigen::MatrixXd key =
      Eigen::MatrixXd::Identity(mdp.n_states(), mdp.n_states()) - form.multi;
  const Eigen::MatrixXd a =
      features.phi.transpose() * pi.asDiagonal() * key * features.phi;
  const Eigen::VectorXd b =
      features.phi.transpose() * (pi.cwiseProduct(form.offset));

  DescentReport report;
  report.threshold = (1.0 - alpha) * omega;
  report.n_trials = n_trials;
  report.min_ratio = std::numeric_limits<double>::infinity();

  Rng rng(mix64(seed));
  for (int trial = 0; trial < n_trials; ++trial) {
    const Eigen::VectorXd theta = sample_in_ball(rng, features.dim(), radius);
    const Eigen::VectorXd diff = fp.theta_star - theta;
    const double dist_sq = diff.squaredNorm();
    if (dist_sq < 1e-24) continue;  // at the fixed point both sides vanish
    const Eigen::VectorXd g = b - a * theta;
    const double ratio = diff.dot(g) / dist_sq;
    if (ratio < report.min_ratio) {
      report.min_ratio = ratio;
      report.worst_theta = theta;
    }
  }
  report.slack = report.min_ratio - report.threshold;
  report.passed = report.slack >= -1e-9;
  return report;
}

BiasReport bias_certificate(const Mdp& mdp, const FeatureMap& features,
                            const Eigen::VectorXd& pi,
                            const Eigen::VectorXd& theta, int window,
                            const TheoryConstants& constants) {
  if (window < 1) throw std::invalid_argument("bias_certificate: window >= 1");
  if (theta.norm() > constants.R + 1e-9)
    throw std::invalid_argument(
        "bias_certificate: theta lies outside the radius the constants were "
        "built for");

  const int n = mdp.n_states();
  Eigen::MatrixXd power = mdp.transition;
  for (int t = 1; t < window; ++t) power = power * mdp.transition;

  // Per-state Bellman residual; the semi-gradient expectation under any state
  // law d is Phi^T Diag(d) u.
  const Eigen::VectorXd values = features.phi * theta;
  const Eigen::VectorXd u = bellman_apply(mdp, values) - values;
  const Eigen::VectorXd g = features.phi.transpose() * (pi.cwiseProduct(u));

  BiasReport report;
  report.window = window;
  for (int s0 = 0; s0 < n; ++s0) {
    const Eigen::VectorXd law = power.row(s0).transpose();
    const double bias =
        (features.phi.transpose() * (law.cwiseProduct(u)) - g).norm();
    if (bias > report.max_bias) {
      report.max_bias = bias;
      report.worst_start = s0;
    }
  }

  const double decay = std::pow(constants.rho, window);
  report.bound = constants.kappa * decay;
  report.bound_state_scaled = static_cast<double>(n) * report.bound;
  report.passed = report.max_bias <= report.bound;
  report.passed_state_scaled = report.max_bias <= report.bound_state_scaled;
  return report;
}

}  // namespace adatd
