#include "adatd/constants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adatd {

double zeta_term(double gamma_lambda, double rho, long k) {
  if (gamma_lambda == 0.0) return 0.0;  // 0^0 = 0 convention
  double sum = 0.0;
  double rho_t = 1.0;
  for (long t = 1; t <= k; ++t) {
    rho_t *= rho;
    sum += std::pow(gamma_lambda, static_cast<double>(k - t)) * rho_t;
  }
  return sum;
}

double zeta_series_sum(double gamma_lambda, double rho, bool lam_is_zero) {
  if (lam_is_zero || gamma_lambda == 0.0) return 0.0;
  if (gamma_lambda >= 1.0 || rho >= 1.0)
    throw std::invalid_argument("zeta_series_sum: needs gamma*lam, rho < 1");

  // zeta_k obeys zeta_k = q zeta_{k-1} + rho^k; sum until the tail dies.
  double sum = 0.0;
  double zeta = 0.0;
  double rho_k = 1.0;
  for (long k = 1; k <= 10'000'000; ++k) {
    rho_k *= rho;
    zeta = gamma_lambda * zeta + rho_k;
    sum += zeta;
    if (zeta < 1e-18 && k > 8) break;
  }
  return sum;
}

double zeta_series_bound(double gamma_lambda, double rho) {
  const double q = std::max(gamma_lambda, rho);
  return q / ((1.0 - q) * (1.0 - q));
}

int delayed_expectation_window(long K, double rho) {
  if (rho <= 0.0) return 1;  // perfect mixing degenerates the window
  const double k0 =
      std::ceil(std::log(static_cast<double>(K)) / std::log(1.0 / rho));
  return std::max(1, static_cast<int>(k0));
}

TheoryConstants theorem_constants(double lam, const ConstantInputs& in,
                                  long K) {
  if (K < 2) throw std::invalid_argument("theorem_constants: K >= 2");
  if (!(in.delta > 0.0))
    throw std::invalid_argument("theorem_constants: delta > 0");

  TheoryConstants c;
  c.B = in.reward_bound;
  c.R = in.radius;
  c.G = 2.0 * in.radius + in.reward_bound;
  c.kappa = in.kappa_bar * (in.reward_bound + in.radius * in.gamma + in.radius);
  c.omega = in.omega;
  c.alpha = in.gamma * (1.0 - lam) / (1.0 - in.gamma * lam);
  c.rho = in.rho;
  c.kappa_bar = in.kappa_bar;
  c.K = K;
  c.K0 = delayed_expectation_window(K, in.rho);

  const double B = c.B, R = c.R, G = c.G, omega = c.omega, alpha = c.alpha;
  const double gamma = in.gamma, beta = in.beta, eta = in.eta,
               delta = in.delta, kappa_bar = in.kappa_bar, rho = in.rho;
  const double sqrt_delta = std::sqrt(delta);

  // (ln K / ln(1/rho))^2, taken as 0 in the perfectly mixing case.
  const double log_ratio =
      rho > 0.0 ? std::log(static_cast<double>(K)) / std::log(1.0 / rho) : 0.0;
  const double log_ratio_sq = log_ratio * log_ratio;

  c.C1 = 16.0 * log_ratio_sq * G /
             (sqrt_delta * (1.0 - gamma) * (1.0 - gamma) * omega * omega) +
         2.0 * eta * beta * G / ((1.0 - beta) * (1.0 - gamma) * omega) +
         eta * G / ((1.0 - gamma) * omega) +
         4.0 * R * G * G / ((1.0 - gamma) * omega * delta);
  c.C2 = 4.0 * R * R * G / ((1.0 - gamma) * omega * eta) +
         4.0 * R * eta * G * G /
             (sqrt_delta * (1.0 - beta) * (1.0 - gamma) * omega) +
         4.0 * R * kappa_bar * (B + R * gamma + R) * G /
             (sqrt_delta * (1.0 - gamma) * omega);

  const double gamma_lambda = gamma * lam;
  c.zeta_sum = zeta_series_sum(gamma_lambda, rho, lam == 0.0);

  c.C1_lam =
      16.0 * log_ratio_sq * G /
          (sqrt_delta * (1.0 - gamma) * (1.0 - alpha) * omega * omega) +
      2.0 * eta * beta * G / ((1.0 - beta) * (1.0 - alpha) * omega) +
      eta * G / ((1.0 - alpha) * omega) +
      4.0 * R * G * G / (delta * (1.0 - alpha) * omega);
  c.C2_lam = 4.0 * R * R * G / (eta * (1.0 - alpha) * omega) +
             4.0 * R * G * G * eta /
                 (sqrt_delta * (1.0 - beta) * (1.0 - alpha) * omega) +
             2.0 * R * G * G * c.zeta_sum /
                 (sqrt_delta * (1.0 - gamma_lambda) * (1.0 - alpha) * omega) +
             4.0 * R * kappa_bar * (B + R * gamma + R) * G /
                 ((1.0 - alpha) * sqrt_delta * omega);
  return c;
}

double theorem_bound(double lam, const ConstantInputs& in, long K) {
  const TheoryConstants c = theorem_constants(lam, in, K);
  const double c1 = lam == 0.0 ? c.C1 : c.C1_lam;
  const double c2 = lam == 0.0 ? c.C2 : c.C2_lam;
  const double log_term =
      std::log((in.delta + static_cast<double>(K) * c.G * c.G) / in.delta);
  return (c1 * log_term + c2) / std::sqrt(static_cast<double>(K));
}

double radius_lower_bound(double reward_bound, double omega, double gamma,
                          double lam) {
  if (!(omega > 0.0)) throw std::invalid_argument("radius bound: omega > 0");
  const double alpha = gamma * (1.0 - lam) / (1.0 - gamma * lam);
  return 2.0 * reward_bound /
         (std::sqrt(omega) * (1.0 - gamma) * std::sqrt(1.0 - alpha));
}

double radius_lower_bound_weak(double reward_bound, double omega,
                               double gamma) {
  if (!(omega > 0.0)) throw std::invalid_argument("radius bound: omega > 0");
  return 2.0 * reward_bound / (std::sqrt(omega) * std::sqrt(1.0 - gamma));
}

}  // namespace adatd
