#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "adatd/features.hpp"
#include "adatd/mdp.hpp"

namespace adatd {

// Step size, stability constant, momentum, trace parameter, projection
// radius. radius may be +infinity for the unprojected baselines.
// strict_radius controls what happens when a finite radius falls below the
// analysis lower bound for the problem at hand: warn (default) or reject.
struct Hyperparams {
  double eta = 0.1;
  double delta = 1.0;
  double beta = 0.0;
  double lam = 0.0;
  double radius = std::numeric_limits<double>::infinity();
  bool strict_radius = false;

  void validate() const;  // throws std::invalid_argument naming the field
};

// Learner state shared by every algorithm here. m/v/z stay zero for the
// algorithms that do not use them. k counts the next step, starting at 1.
struct AdaTdState {
  Eigen::VectorXd theta;
  Eigen::VectorXd m;
  Eigen::VectorXd z;
  double v = 0.0;
  long k = 1;

  static AdaTdState initial(int dim);
};

// d_k = r + gamma phi(s')^T theta - phi(s)^T theta.
double td_error(const Eigen::VectorXd& theta, const FeatureMap& features,
                const Transition& t, double gamma);

// d_k * phi(s_k).
Eigen::VectorXd semi_gradient(const Eigen::VectorXd& theta,
                              const FeatureMap& features, const Transition& t,
                              double gamma);

// Euclidean projection onto {x : ||x|| <= radius}; the identity for points
// already inside (and for radius = infinity).
Eigen::VectorXd project_ball(const Eigen::VectorXd& y, double radius);

// z' = (gamma lam) z + phi(s).
Eigen::VectorXd trace_update(const Eigen::VectorXd& z,
                             const FeatureMap& features, int s, double gamma,
                             double lam);

// d_k * z — the trace-weighted semi-gradient.
Eigen::VectorXd lambda_semi_gradient(const Eigen::VectorXd& theta,
                                     const FeatureMap& features,
                                     const Transition& t,
                                     const Eigen::VectorXd& z, double gamma);

// theta <- Proj(theta + eta gbar). Leaves m, v, z untouched.
void projected_td0_step(AdaTdState& state, const Hyperparams& hp,
                        const FeatureMap& features, const Transition& t,
                        double gamma);

// The three-part adaptive update:
//   m <- beta m + (1-beta) gbar
//   v <- v + ||gbar||^2
//   theta <- Proj(theta + eta m / sqrt(v + delta))
void ada_td0_step(AdaTdState& state, const Hyperparams& hp,
                  const FeatureMap& features, const Transition& t,
                  double gamma);

// Trace update, then the adaptive update driven by d_k * z.
void ada_td_lambda_step(AdaTdState& state, const Hyperparams& hp,
                        const FeatureMap& features, const Transition& t,
                        double gamma);

// Trace update, then theta <- Proj(theta + eta d_k z).
void projected_td_lambda_step(AdaTdState& state, const Hyperparams& hp,
                              const FeatureMap& features, const Transition& t,
                              double gamma);

// Everything needed to replay or audit an adaptive run.
struct AdaTrajectory {
  Eigen::VectorXd theta0;
  std::vector<Eigen::VectorXd> gbar;   // per step k = 1..K
  std::vector<Eigen::VectorXd> m;
  std::vector<double> v;
  std::vector<Eigen::VectorXd> theta;  // theta^{k+1}, i.e. post-step iterates
};

// Runs AdaTD(0) for `steps` transitions, recording all intermediates.
AdaTrajectory record_ada_td0(const Mdp& mdp, const FeatureMap& features,
                             const Hyperparams& hp, int start, long steps,
                             std::uint64_t seed);

struct EmaCheckReport {
  bool passed = false;
  double max_deviation = 0.0;
  long first_bad_step = -1;
};

// Replays a recorded trajectory under the moving-average form of the update,
//   theta^{k+1} = Proj(theta^k + (eta/sqrt(k)) m^k / sqrt(v^k/k + delta/k)),
// which is algebraically identical to the sum form. Flags any coordinate
// drifting beyond tol.
EmaCheckReport ema_reformulation_check(const AdaTrajectory& traj,
                                       const Hyperparams& hp,
                                       double tol = 1e-12);

struct TrajectoryBoundsReport {
  bool passed = false;
  double max_dist = 0.0;   // max_k ||theta^k - theta*||, bound 2R
  double max_gbar = 0.0;   // bound G = 2R + B
  double max_m = 0.0;      // bound G
  double dist_bound = 0.0;
  double norm_bound = 0.0;
};

// Checks the uniform iterate/gradient/momentum bounds along a recorded run.
TrajectoryBoundsReport trajectory_bounds_check(const AdaTrajectory& traj,
                                               const Eigen::VectorXd& theta_star,
                                               double radius,
                                               double reward_bound,
                                               double tol = 1e-9);

struct LogSumReport {
  bool passed = false;
  double lhs = 0.0;  // sum_k ||gbar^k||^2 / (v^k + delta)
  double rhs = 0.0;  // ln((delta + K G^2)/delta)
};

// The log-sum inequality satisfied by the realized squared-norm sequence.
LogSumReport adaptive_log_sum_check(const AdaTrajectory& traj, double delta,
                                    double norm_bound, double tol = 1e-9);

struct MomentumCheckReport {
  bool passed = false;
  double max_deviation = 0.0;
};

// m^k must equal (1-beta) sum_{j<=k} beta^{k-j} gbar^j.
MomentumCheckReport momentum_telescoping_check(const AdaTrajectory& traj,
                                               double beta,
                                               double tol = 1e-10);

struct NuFit {
  double c = 0.0;
  double nu = 0.0;
  double max_rel_residual = 0.0;
};

// Least-squares fit of ln v_k = ln c + nu ln k past a 10% burn-in.
// v_trace[i] holds v^{i+1}.
NuFit nu_estimate(const std::vector<double>& v_trace);

}  // namespace adatd
