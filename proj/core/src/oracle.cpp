#include "adatd/oracle.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace adatd {

namespace {

// Dense solve with a condition-number report; throws above kConditionLimit.
Eigen::VectorXd solve_reporting_condition(const Eigen::MatrixXd& a,
                                          const Eigen::VectorXd& b,
                                          double* condition,
                                          const char* what) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double sigma_max = svd.singularValues().maxCoeff();
  const double sigma_min = svd.singularValues().minCoeff();
  const double cond =
      sigma_min > 0.0 ? sigma_max / sigma_min
                      : std::numeric_limits<double>::infinity();
  if (condition != nullptr) *condition = cond;
  if (!(cond < kConditionLimit)) {
    std::ostringstream msg;
    msg << what << ": system condition number " << cond << " exceeds "
        << kConditionLimit;
    throw std::runtime_error(msg.str());
  }
  return svd.solve(b);
}

}  // namespace

Eigen::VectorXd bellman_apply(const Mdp& mdp, const Eigen::VectorXd& v) {
  return expected_reward(mdp) + mdp.discount * (mdp.transition * v);
}

Eigen::VectorXd true_value_function(const Mdp& mdp) {
  const int n = mdp.n_states();
  const Eigen::MatrixXd a =
      Eigen::MatrixXd::Identity(n, n) - mdp.discount * mdp.transition;
  return a.partialPivLu().solve(expected_reward(mdp));
}

Eigen::VectorXd limiting_direction(const Mdp& mdp, const FeatureMap& features,
                                   const Eigen::VectorXd& pi,
                                   const Eigen::VectorXd& theta) {
  const Eigen::VectorXd v = features.phi * theta;
  const Eigen::VectorXd tv = bellman_apply(mdp, v);
  return features.phi.transpose() * (pi.cwiseProduct(tv - v));
}

double pi_norm(const Eigen::VectorXd& pi, const Eigen::VectorXd& v) {
  return std::sqrt(pi.dot(v.cwiseProduct(v)));
}

double lambda_contraction_modulus(double gamma, double lam) {
  return gamma * (1.0 - lam) / (1.0 - gamma * lam);
}

FixedPoint fixed_point_td0(const Mdp& mdp, const FeatureMap& features,
                           const Eigen::VectorXd& pi) {
  const int n = mdp.n_states();
  const Eigen::MatrixXd key =
      Eigen::MatrixXd::Identity(n, n) - mdp.discount * mdp.transition;
  const Eigen::MatrixXd a =
      features.phi.transpose() * pi.asDiagonal() * key * features.phi;
  const Eigen::VectorXd b =
      features.phi.transpose() * (pi.cwiseProduct(expected_reward(mdp)));

  FixedPoint fp;
  fp.lam = 0.0;
  fp.theta_star =
      solve_reporting_condition(a, b, &fp.condition, "fixed_point_td0");
  fp.value_vector = features.phi * fp.theta_star;
  fp.residual = limiting_direction(mdp, features, pi, fp.theta_star).norm();
  return fp;
}

int lambda_series_length(double lam) {
  if (lam <= 0.0) return 0;
  return static_cast<int>(std::ceil(std::log(1e-14) / std::log(lam)));
}

Eigen::VectorXd lambda_bellman_apply(const Mdp& mdp, const Eigen::VectorXd& v,
                                     double lam, int m_max) {
  if (lam < 0.0 || lam >= 1.0)
    throw std::invalid_argument(
        "lambda_bellman_apply: the series form needs lam in [0, 1); the "
        "lam = 1 operator is defined only through its projection limit");
  const int n = mdp.n_states();
  const double gamma = mdp.discount;
  const Eigen::VectorXd rbar = expected_reward(mdp);
  if (lam == 0.0) m_max = 0;

  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd reward_tail = rbar;            // gamma^t P^t R at t = m
  Eigen::VectorXd reward_sum = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd value_tail = v;                // gamma^m P^m V
  double weight = 1.0 - lam;                     // (1-lam) lam^m

  for (int m = 0; m <= m_max; ++m) {
    reward_sum += reward_tail;
    value_tail = gamma * (mdp.transition * value_tail);  // now gamma^{m+1} P^{m+1} V
    out += weight * (reward_sum + value_tail);
    if (m < m_max) {
      reward_tail = gamma * (mdp.transition * reward_tail);
      weight *= lam;
    }
  }
  return out;
}

LambdaBellmanForm lambda_bellman_closed_form(const Mdp& mdp, double lam) {
  if (lam < 0.0 || lam > 1.0)
    throw std::invalid_argument("lambda_bellman_closed_form: lam in [0, 1]");
  const int n = mdp.n_states();
  const double gamma = mdp.discount;

  LambdaBellmanForm form;
  const Eigen::MatrixXd resolvent =
      (Eigen::MatrixXd::Identity(n, n) - lam * gamma * mdp.transition)
          .partialPivLu()
          .solve(Eigen::MatrixXd::Identity(n, n));
  form.offset = resolvent * expected_reward(mdp);
  form.multi = (1.0 - lam) * gamma * mdp.transition * resolvent;
  return form;
}

Eigen::VectorXd lambda_limiting_direction(const Mdp& mdp,
                                          const FeatureMap& features,
                                          const Eigen::VectorXd& pi,
                                          double lam,
                                          const Eigen::VectorXd& theta) {
  const LambdaBellmanForm form = lambda_bellman_closed_form(mdp, lam);
  const Eigen::VectorXd v = features.phi * theta;
  const Eigen::VectorXd tv = form.offset + form.multi * v;
  return features.phi.transpose() * (pi.cwiseProduct(tv - v));
}

FixedPoint fixed_point_td_lambda(const Mdp& mdp, const FeatureMap& features,
                                 const Eigen::VectorXd& pi, double lam) {
  if (lam < 0.0 || lam > 1.0)
    throw std::invalid_argument("fixed_point_td_lambda: lam in [0, 1]");
  const int n = mdp.n_states();

  const LambdaBellmanForm form = lambda_bellman_closed_form(mdp, lam);
  const Eigen::MatrixXd key = Eigen::MatrixXd::Identity(n, n) - form.multi;
  const Eigen::MatrixXd a =
      features.phi.transpose() * pi.asDiagonal() * key * features.phi;
  const Eigen::VectorXd b =
      features.phi.transpose() * (pi.cwiseProduct(form.offset));

  FixedPoint fp;
  fp.lam = lam;
  fp.theta_star =
      solve_reporting_condition(a, b, &fp.condition, "fixed_point_td_lambda");
  fp.value_vector = features.phi * fp.theta_star;

  if (lam < 1.0) {
    const Eigen::VectorXd tv = lambda_bellman_apply(
        mdp, fp.value_vector, lam, lambda_series_length(lam));
    fp.residual =
        (features.phi.transpose() * (pi.cwiseProduct(tv - fp.value_vector)))
            .norm();
  } else {
    // lam = 1: the solve above is the normal equation of the pi-norm
    // projection of V_mu; report its residual.
    fp.residual = (b - a * fp.theta_star).norm();
  }
  return fp;
}

ApproximationGap approximation_gap(const Mdp& mdp, const FeatureMap& features,
                                   const Eigen::VectorXd& pi, double lam) {
  const Eigen::VectorXd v_mu = true_value_function(mdp);
  const FixedPoint fp = fixed_point_td_lambda(mdp, features, pi, lam);

  // Projection of V_mu onto span(Phi) in the pi-weighted inner product.
  const Eigen::MatrixXd gram =
      features.phi.transpose() * pi.asDiagonal() * features.phi;
  const Eigen::VectorXd coeffs = gram.partialPivLu().solve(
      features.phi.transpose() * (pi.cwiseProduct(v_mu)));
  const Eigen::VectorXd projected = features.phi * coeffs;

  const double alpha = lambda_contraction_modulus(mdp.discount, lam);
  ApproximationGap gap;
  gap.lhs = pi_norm(pi, fp.value_vector - v_mu);
  gap.rhs = pi_norm(pi, projected - v_mu) / std::sqrt(1.0 - alpha * alpha);
  return gap;
}

}  // namespace adatd
