#pragma once

namespace adatd {

// Problem- and hyperparameter-level inputs the convergence constants are
// built from.
struct ConstantInputs {
  double reward_bound = 0.0;  // B
  double radius = 0.0;        // R (or R-hat for the trace variant)
  double gamma = 0.0;
  double beta = 0.0;
  double eta = 0.0;
  double delta = 0.0;
  double omega = 0.0;
  double kappa_bar = 0.0;
  double rho = 0.0;
};

struct TheoryConstants {
  double B = 0.0;
  double R = 0.0;
  double G = 0.0;         // 2R + B
  double kappa = 0.0;     // kappa_bar (B + R gamma + R)
  double omega = 0.0;
  double alpha = 0.0;     // gamma (1-lam) / (1 - gamma lam)
  double C1 = 0.0;        // lam = 0 rate constants
  double C2 = 0.0;
  double C1_lam = 0.0;    // trace-variant rate constants
  double C2_lam = 0.0;
  double zeta_sum = 0.0;  // sum_k sum_{t<=k} (gamma lam)^{k-t} rho^t
  double rho = 0.0;
  double kappa_bar = 0.0;
  long K = 0;
  int K0 = 0;             // ceil(ln K / ln(1/rho)), 1 when rho = 0
};

// zeta_k = sum_{t=1..k} q^{k-t} rho^t with q = gamma*lam, under the 0^0 = 0
// convention (zeta vanishes identically when lam = 0).
double zeta_term(double gamma_lambda, double rho, long k);

// sum_{k>=1} zeta_k by direct summation (0 when lam = 0).
double zeta_series_sum(double gamma_lambda, double rho, bool lam_is_zero);

// Closed-form cap: max{q, rho} / (1 - max{q, rho})^2.
double zeta_series_bound(double gamma_lambda, double rho);

int delayed_expectation_window(long K, double rho);  // the K0 above

// Evaluates every constant of the two convergence statements at horizon K.
TheoryConstants theorem_constants(double lam, const ConstantInputs& in, long K);

// Full right-hand side (C1 ln((delta + K G^2)/delta) + C2) / sqrt(K) at
// horizon K, with the lam = 0 constants when lam = 0 and the trace-variant
// constants otherwise.
double theorem_bound(double lam, const ConstantInputs& in, long K);

// Smallest projection radius the analysis supports:
//   2B / (sqrt(omega) (1-gamma) sqrt(1-alpha)),
// which at lam = 0 reduces to 2B / (sqrt(omega) (1-gamma)^{3/2}).
double radius_lower_bound(double reward_bound, double omega, double gamma,
                          double lam);

// The weaker 2B / (sqrt(omega) sqrt(1-gamma)) variant, exposed for
// comparison.
double radius_lower_bound_weak(double reward_bound, double omega,
                               double gamma);

}  // namespace adatd
