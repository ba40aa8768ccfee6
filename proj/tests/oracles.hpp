#pragma once

// Closed-form reference values used by the tests. Nothing here calls into
// the library.

#include <cmath>
#include <limits>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

inline double normal_upper_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }
inline double normal_cdf(double x) { return normal_upper_tail(-x); }

// Minimum energy to steer dx = h dt from x0 to z on [0, T].
inline double schilder_rate(double x0, double z, double T) {
  return (z - x0) * (z - x0) / (2.0 * T);
}

// Minimum of 1/2 int h^2 subject to dx = (-a x + h) dt, x(0) = x0, x(T) = z.
// The optimal control is h(t) = c e^{-a (T - t)}; the controllability
// Gramian is (1 - e^{-2aT}) / (2a).
inline double ou_rate(double a, double x0, double z, double T) {
  const double gap = z - x0 * std::exp(-a * T);
  const double gram = (1.0 - std::exp(-2.0 * a * T)) / (2.0 * a);
  return 0.5 * gap * gap / gram;
}

// Same quantity by brute force over controls h(t) = c e^{lambda t}: for each
// lambda, c is fixed by the endpoint and the energy is integrated in closed
// form. Returns the smallest action found on the lambda grid.
inline double ou_rate_grid_search(double a, double x0, double z, double T,
                                  double lambda_lo = -6.0, double lambda_hi = 6.0,
                                  int n = 120001) {
  auto integral_exp = [](double k, double T) {
    return std::abs(k) < 1e-12 ? T : (std::exp(k * T) - 1.0) / k;
  };
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double lam = lambda_lo + (lambda_hi - lambda_lo) * i / (n - 1);
    // x(T) = x0 e^{-aT} + c e^{-aT} int_0^T e^{(a + lam) t} dt
    const double reach = std::exp(-a * T) * integral_exp(a + lam, T);
    const double c = (z - x0 * std::exp(-a * T)) / reach;
    const double action = 0.5 * c * c * integral_exp(2.0 * lam, T);
    if (action < best) best = action;
  }
  return best;
}

// P(sup_{t <= 1} |B_t| >= x) by the alternating image series.
inline double brownian_abs_sup_tail(double x) {
  if (x <= 0.0) return 1.0;
  double inside = 0.0;
  for (int k = -60; k <= 60; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    inside += sign * (normal_cdf((2 * k + 1) * x) - normal_cdf((2 * k - 1) * x));
  }
  return std::min(1.0, std::max(0.0, 1.0 - inside));
}

// Shift that maps a continuously monitored barrier onto one monitored at
// spacing dt (units of the driving Brownian motion).
inline constexpr double kDiscreteMonitoringShift = 0.5826;

inline double brownian_abs_sup_tail_discrete(double x, double dt) {
  return brownian_abs_sup_tail(x + kDiscreteMonitoringShift * std::sqrt(dt));
}

// eps log P(sqrt(eps) B_1 >= 1).
inline double brownian_eps_log_p(double eps) {
  return eps * std::log(normal_upper_tail(1.0 / std::sqrt(eps)));
}

// OU endpoint x(T) with dx = -a x dt + sqrt(eps) dB: Gaussian with mean
// x0 e^{-aT} and variance eps (1 - e^{-2aT}) / (2a).
inline double ou_endpoint_exceed(double a, double x0, double c, double T, double eps) {
  const double mean = x0 * std::exp(-a * T);
  const double sd = std::sqrt(eps * (1.0 - std::exp(-2.0 * a * T)) / (2.0 * a));
  return normal_upper_tail((c - mean) / sd);
}

// Skeleton of dx = h dt with h = sin(2 pi n t / T): x(t) = T (1 - cos) / (2 pi n),
// so the uniform distance to the zero-control skeleton is T / (pi n).
inline double sinusoid_sup_distance(int n, double T) { return T / (kPi * n); }

}  // namespace oracle
