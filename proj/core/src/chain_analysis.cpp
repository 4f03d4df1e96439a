#include "adatd/chain_analysis.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace adatd {

namespace {

Eigen::MatrixXd adjacency(const Eigen::MatrixXd& transition) {
  return (transition.array() > 0.0).cast<double>();
}

// Boolean matrix product with entries clamped to {0, 1}.
Eigen::MatrixXd bool_product(const Eigen::MatrixXd& a,
                             const Eigen::MatrixXd& b) {
  return ((a * b).array() > 0.0).cast<double>();
}

}  // namespace

bool is_irreducible(const Eigen::MatrixXd& transition) {
  // Reachability closure: irreducible iff (I + A)^(n-1) is entrywise
  // positive. Powers of I + A are monotone, so squaring up to an exponent
  // >= n - 1 computes the closure in log(n) boolean products.
  const int n = static_cast<int>(transition.rows());
  Eigen::MatrixXd reach =
      ((adjacency(transition) + Eigen::MatrixXd::Identity(n, n)).array() > 0.0)
          .cast<double>();
  long exponent = 1;
  while (exponent < n - 1) {
    if ((reach.array() > 0.0).all()) return true;
    reach = bool_product(reach, reach);
    exponent *= 2;
  }
  return (reach.array() > 0.0).all();
}

bool is_aperiodic(const Eigen::MatrixXd& transition) {
  // Primitivity scan: P^t entrywise positive for some t <= |S|^2. For an
  // irreducible chain positivity is monotone in t, so checking powers of two
  // up to 2|S|^2 suffices.
  const int n = static_cast<int>(transition.rows());
  const long limit = 2L * n * n;
  Eigen::MatrixXd power = adjacency(transition);
  long exponent = 1;
  while (exponent <= limit) {
    if ((power.array() > 0.0).all()) return true;
    power = bool_product(power, power);
    exponent *= 2;
  }
  return false;
}

Eigen::VectorXd stationary_distribution(const Mdp& mdp) {
  mdp.validate();
  const int n = mdp.n_states();

  if (!is_irreducible(mdp.transition))
    throw std::invalid_argument(
        "stationary_distribution: chain is reducible (some state pair is "
        "mutually unreachable), so a positive stationary limit cannot exist");
  if (!is_aperiodic(mdp.transition))
    throw std::invalid_argument(
        "stationary_distribution: chain is periodic (no power of P is "
        "entrywise positive), so the distribution of s_t does not converge");

  // pi solves pi (P - I) = 0 with sum(pi) = 1: replace one equation of the
  // transposed system with the normalization row.
  Eigen::MatrixXd a = mdp.transition.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(b);
  pi /= pi.sum();

  if (pi.minCoeff() <= 0.0)
    throw std::runtime_error(
        "stationary_distribution: solver produced a non-positive entry");
  const double residual =
      (pi.transpose() * mdp.transition - pi.transpose()).cwiseAbs().maxCoeff();
  if (residual > 1e-10) {
    std::ostringstream msg;
    msg << "stationary_distribution: pi.P = pi residual " << residual
        << " exceeds 1e-10";
    throw std::runtime_error(msg.str());
  }
  return pi;
}

double mixing_rate(const Mdp& mdp) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(mdp.transition);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("mixing_rate: eigensolver failed to converge");

  const auto moduli = solver.eigenvalues().cwiseAbs();
  double largest = 0.0, second = 0.0;
  for (int i = 0; i < moduli.size(); ++i) {
    const double m = moduli(i);
    if (m > largest) {
      second = largest;
      largest = m;
    } else if (m > second) {
      second = m;
    }
  }
  if (std::abs(largest - 1.0) > 1e-8)
    throw std::runtime_error("mixing_rate: leading eigenvalue is not 1");
  if (second < 1e-13) return 0.0;  // rank-one kernels: snap eigen-noise to 0
  return std::min(second, 1.0 - 1e-15);
}

int default_fit_horizon(double rho) {
  return 10 * static_cast<int>(std::ceil(1.0 / (1.0 - rho)));
}

double fit_kappa_bar(const Mdp& mdp, const Eigen::VectorXd& pi, double rho,
                     int horizon) {
  if (horizon < 1) throw std::invalid_argument("fit_kappa_bar: horizon >= 1");
  if (rho < 0.0 || rho >= 1.0)
    throw std::invalid_argument("fit_kappa_bar: rho must lie in [0, 1)");

  const int n = mdp.n_states();
  // Distances below this are indistinguishable from a fully mixed chain in
  // double precision and contribute nothing to the fit.
  const double noise_floor = 1e-14;

  Eigen::MatrixXd power = mdp.transition;
  double kappa_bar = 0.0;
  for (int t = 1; t <= horizon; ++t) {
    double dist = 0.0;
    for (int s = 0; s < n; ++s)
      dist = std::max(dist, (power.row(s).transpose() - pi).cwiseAbs().sum());

    if (dist > noise_floor) {
      if (rho == 0.0) {
        std::ostringstream msg;
        msg << "fit_kappa_bar: rho = 0 but the t=" << t
            << " distance to stationarity is " << dist
            << "; the geometric mixing bound is unsatisfiable with this rho";
        throw std::invalid_argument(msg.str());
      }
      kappa_bar = std::max(kappa_bar, dist / std::pow(rho, t));
    }
    if (t < horizon) power = power * mdp.transition;
  }
  return kappa_bar;
}

int mixing_time(double kappa_bar, double rho, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("mixing_time: eps > 0");
  if (rho < 0.0 || rho >= 1.0)
    throw std::invalid_argument("mixing_time: rho must lie in [0, 1)");
  if (kappa_bar <= eps) return 0;
  if (rho == 0.0) return 1;

  // Closed form, then nudge to the exact integer threshold.
  int t = static_cast<int>(std::ceil(std::log(eps / kappa_bar) / std::log(rho)));
  if (t < 0) t = 0;
  while (kappa_bar * std::pow(rho, t) > eps) ++t;
  while (t > 0 && kappa_bar * std::pow(rho, t - 1) <= eps) --t;
  return t;
}

double feature_gram_omega(const Mdp& mdp, const FeatureMap& features,
                          const Eigen::VectorXd& pi) {
  if (features.n_states() != mdp.n_states())
    throw std::invalid_argument("feature_gram_omega: feature row count != |S|");
  features.validate();

  const Eigen::MatrixXd gram =
      features.phi.transpose() * pi.asDiagonal() * features.phi;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("feature_gram_omega: eigensolver failed");
  const double omega = solver.eigenvalues().minCoeff();
  if (!(omega > 0.0))
    throw std::runtime_error(
        "feature_gram_omega: Gram matrix not positive definite despite "
        "full-rank features; stationary distribution may lack full support");
  return omega;
}

ChainDiagnostics analyze_chain(const Mdp& mdp, const FeatureMap& features,
                               int fit_horizon) {
  ChainDiagnostics diag;
  diag.pi = stationary_distribution(mdp);
  diag.rho = mixing_rate(mdp);
  diag.fit_horizon =
      fit_horizon > 0 ? fit_horizon : default_fit_horizon(diag.rho);
  diag.kappa_bar = fit_kappa_bar(mdp, diag.pi, diag.rho, diag.fit_horizon);
  diag.omega = feature_gram_omega(mdp, features, diag.pi);
  return diag;
}

}  // namespace adatd
