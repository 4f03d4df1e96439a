#include "adatd/learners.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace adatd {

void Hyperparams::validate() const {
  if (!(eta > 0.0)) throw std::invalid_argument("hyperparams: eta > 0");
  if (!(delta > 0.0))
    throw std::invalid_argument(
        "hyperparams: delta > 0 (delta = 0 removes the division guard and "
        "blows up the rate constants)");
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("hyperparams: beta in [0, 1)");
  if (!(lam >= 0.0 && lam <= 1.0))
    throw std::invalid_argument("hyperparams: lambda in [0, 1]");
  if (!(radius > 0.0))
    throw std::invalid_argument("hyperparams: radius > 0");
}

AdaTdState AdaTdState::initial(int dim) {
  AdaTdState s;
  s.theta = Eigen::VectorXd::Zero(dim);
  s.m = Eigen::VectorXd::Zero(dim);
  s.z = Eigen::VectorXd::Zero(dim);
  s.v = 0.0;
  s.k = 1;
  return s;
}

double td_error(const Eigen::VectorXd& theta, const FeatureMap& features,
                const Transition& t, double gamma) {
  return t.r + gamma * features.phi.row(t.s_next).dot(theta) -
         features.phi.row(t.s).dot(theta);
}

Eigen::VectorXd semi_gradient(const Eigen::VectorXd& theta,
                              const FeatureMap& features, const Transition& t,
                              double gamma) {
  return td_error(theta, features, t, gamma) *
         features.phi.row(t.s).transpose();
}

Eigen::VectorXd project_ball(const Eigen::VectorXd& y, double radius) {
  const double norm = y.norm();
  if (norm <= radius) return y;
  return y * (radius / norm);
}

Eigen::VectorXd trace_update(const Eigen::VectorXd& z,
                             const FeatureMap& features, int s, double gamma,
                             double lam) {
  return (gamma * lam) * z + features.phi.row(s).transpose();
}

Eigen::VectorXd lambda_semi_gradient(const Eigen::VectorXd& theta,
                                     const FeatureMap& features,
                                     const Transition& t,
                                     const Eigen::VectorXd& z, double gamma) {
  return td_error(theta, features, t, gamma) * z;
}

namespace {

// Steps (9a)-(9c): momentum, accumulated squared norms, scaled projected move.
void adaptive_moment_update(AdaTdState& state, const Hyperparams& hp,
                            const Eigen::VectorXd& gbar) {
  state.m = hp.beta * state.m + (1.0 - hp.beta) * gbar;
  state.v += gbar.squaredNorm();
  state.theta = project_ball(
      state.theta + hp.eta * state.m / std::sqrt(state.v + hp.delta),
      hp.radius);
  state.k += 1;
}

}  // namespace

void projected_td0_step(AdaTdState& state, const Hyperparams& hp,
                        const FeatureMap& features, const Transition& t,
                        double gamma) {
  const Eigen::VectorXd gbar = semi_gradient(state.theta, features, t, gamma);
  state.theta = project_ball(state.theta + hp.eta * gbar, hp.radius);
  state.k += 1;
}

void ada_td0_step(AdaTdState& state, const Hyperparams& hp,
                  const FeatureMap& features, const Transition& t,
                  double gamma) {
  const Eigen::VectorXd gbar = semi_gradient(state.theta, features, t, gamma);
  adaptive_moment_update(state, hp, gbar);
}

void ada_td_lambda_step(AdaTdState& state, const Hyperparams& hp,
                        const FeatureMap& features, const Transition& t,
                        double gamma) {
  state.z = trace_update(state.z, features, t.s, gamma, hp.lam);
  const Eigen::VectorXd gbar =
      lambda_semi_gradient(state.theta, features, t, state.z, gamma);
  adaptive_moment_update(state, hp, gbar);
}

void projected_td_lambda_step(AdaTdState& state, const Hyperparams& hp,
                              const FeatureMap& features, const Transition& t,
                              double gamma) {
  state.z = trace_update(state.z, features, t.s, gamma, hp.lam);
  const Eigen::VectorXd gbar =
      lambda_semi_gradient(state.theta, features, t, state.z, gamma);
  state.theta = project_ball(state.theta + hp.eta * gbar, hp.radius);
  state.k += 1;
}

AdaTrajectory record_ada_td0(const Mdp& mdp, const FeatureMap& features,
                             const Hyperparams& hp, int start, long steps,
                             std::uint64_t seed) {
  hp.validate();
  AdaTrajectory traj;
  AdaTdState state = AdaTdState::initial(features.dim());
  traj.theta0 = state.theta;
  traj.gbar.reserve(steps);
  traj.m.reserve(steps);
  traj.v.reserve(steps);
  traj.theta.reserve(steps);

  ChainSampler sampler(mdp, start, seed);
  for (long k = 0; k < steps; ++k) {
    const Transition t = sampler.next();
    traj.gbar.push_back(semi_gradient(state.theta, features, t, mdp.discount));
    ada_td0_step(state, hp, features, t, mdp.discount);
    traj.m.push_back(state.m);
    traj.v.push_back(state.v);
    traj.theta.push_back(state.theta);
  }
  return traj;
}

EmaCheckReport ema_reformulation_check(const AdaTrajectory& traj,
                                       const Hyperparams& hp, double tol) {
  EmaCheckReport report;
  Eigen::VectorXd theta = traj.theta0;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(traj.theta0.size());
  double v = 0.0;

  for (std::size_t i = 0; i < traj.gbar.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    m = hp.beta * m + (1.0 - hp.beta) * traj.gbar[i];
    v += traj.gbar[i].squaredNorm();
    const double v_hat = v / k;
    theta = project_ball(
        theta + (hp.eta / std::sqrt(k)) * m / std::sqrt(v_hat + hp.delta / k),
        hp.radius);

    const double dev = (theta - traj.theta[i]).cwiseAbs().maxCoeff();
    if (dev > report.max_deviation) report.max_deviation = dev;
    if (dev > tol && report.first_bad_step < 0)
      report.first_bad_step = static_cast<long>(i + 1);
  }
  report.passed = report.first_bad_step < 0;
  return report;
}

TrajectoryBoundsReport trajectory_bounds_check(const AdaTrajectory& traj,
                                               const Eigen::VectorXd& theta_star,
                                               double radius,
                                               double reward_bound,
                                               double tol) {
  TrajectoryBoundsReport report;
  report.dist_bound = 2.0 * radius;
  report.norm_bound = 2.0 * radius + reward_bound;

  report.max_dist = (traj.theta0 - theta_star).norm();
  for (const auto& th : traj.theta)
    report.max_dist = std::max(report.max_dist, (th - theta_star).norm());
  for (const auto& g : traj.gbar)
    report.max_gbar = std::max(report.max_gbar, g.norm());
  for (const auto& m : traj.m)
    report.max_m = std::max(report.max_m, m.norm());

  report.passed = report.max_dist <= report.dist_bound + tol &&
                  report.max_gbar <= report.norm_bound + tol &&
                  report.max_m <= report.norm_bound + tol;
  return report;
}

LogSumReport adaptive_log_sum_check(const AdaTrajectory& traj, double delta,
                                    double norm_bound, double tol) {
  LogSumReport report;
  for (std::size_t i = 0; i < traj.gbar.size(); ++i)
    report.lhs += traj.gbar[i].squaredNorm() / (traj.v[i] + delta);
  const double K = static_cast<double>(traj.gbar.size());
  report.rhs =
      std::log((delta + K * norm_bound * norm_bound) / delta);
  report.passed = report.lhs <= report.rhs + tol;
  return report;
}

MomentumCheckReport momentum_telescoping_check(const AdaTrajectory& traj,
                                               double beta, double tol) {
  MomentumCheckReport report;
  Eigen::VectorXd expanded = Eigen::VectorXd::Zero(traj.theta0.size());
  for (std::size_t k = 0; k < traj.gbar.size(); ++k) {
    // (1-beta) sum_{j<=k} beta^{k-j} g^j, accumulated incrementally.
    expanded = beta * expanded + (1.0 - beta) * traj.gbar[k];
    const double dev = (expanded - traj.m[k]).norm();
    if (dev > report.max_deviation) report.max_deviation = dev;
  }
  report.passed = report.max_deviation <= tol;
  return report;
}

NuFit nu_estimate(const std::vector<double>& v_trace) {
  if (v_trace.size() < 100)
    throw std::invalid_argument("nu_estimate: need at least 100 samples");
  const std::size_t burn = v_trace.size() / 10;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (std::size_t i = burn; i < v_trace.size(); ++i) {
    if (!(v_trace[i] > 0.0))
      throw std::invalid_argument(
          "nu_estimate: v is not positive past burn-in (no gradient signal)");
    const double x = std::log(static_cast<double>(i + 1));
    const double y = std::log(v_trace[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  const double n = static_cast<double>(count);
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-12)
    throw std::runtime_error("nu_estimate: degenerate fit window");

  NuFit fit;
  fit.nu = (n * sxy - sx * sy) / denom;
  fit.c = std::exp((sy - fit.nu * sx) / n);
  for (std::size_t i = burn; i < v_trace.size(); ++i) {
    const double predicted =
        fit.c * std::pow(static_cast<double>(i + 1), fit.nu);
    fit.max_rel_residual = std::max(
        fit.max_rel_residual, std::abs(predicted - v_trace[i]) / v_trace[i]);
  }
  return fit;
}

}  // namespace adatd
