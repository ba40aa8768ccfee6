#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ldp/modulus.hpp"
#include "ldp/types.hpp"

namespace ldp {

/// Writes b(t, x) into `out` (sized d).
using DriftFn = std::function<void(double t, const Vector& x, Vector& out)>;
/// Writes sigma(t, x) into `out` (sized d x m).
using DiffusionFn = std::function<void(double t, const Vector& x, Matrix& out)>;

using TimeWeight = std::function<double(double t)>;

enum class Domain { kWhole, kNonnegativeOrthant };

/// Lyapunov function V with hand-coded derivatives and the constants of the
/// growth inequality
///   <b, V_x> + delta/2 tr(V_xx sigma sigma^T) + |sigma^T V_x|^2 / (eta V)
///     <= f(t) (1 + gamma(V)).
struct LyapunovBundle {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
  double delta = 1.0;
  double eta = 1.0;
  TimeWeight f_weight;
  Modulus gamma = Modulus::Linear(1.0);
};

/// Constants of the one-sided condition
///   2<x-y, b(x)-b(y)> + ||sigma(x)-sigma(y)||^2 <= g(t) eta_R(|x-y|^2)
/// for |x| v |y| <= R and |x-y| <= eps0.
struct MonotonicityBundle {
  double eps0 = 0.5;
  TimeWeight g_weight;
  std::function<Modulus(double R)> eta_for_radius;

  double eta_R(double R, double s) const { return eta_for_radius(R)(s); }
};

/// A small-noise SDE  dx = b(t,x) dt + sqrt(eps) sigma(t,x) dB  on [0, T].
///
/// Immutable after construction; all callables are pure.
struct ModelSpec {
  std::string name;
  int d = 1;
  int m = 1;
  Vector x0;
  double T = 1.0;
  DriftFn drift;
  DiffusionFn diffusion;
  Domain domain = Domain::kWhole;
  std::optional<LyapunovBundle> lyapunov;
  std::optional<MonotonicityBundle> monotonicity;
  std::map<std::string, double> params;

  Vector drift_at(double t, const Vector& x) const;
  Matrix diffusion_at(double t, const Vector& x) const;

  /// Projects onto the declared domain (identity for kWhole).
  void project(Vector& x) const;
  bool in_domain(const Vector& x) const;

  /// Throws ConfigError unless d, m, T, x0 satisfy their invariants.
  void validate() const;
};

/// Names accepted by build_model, in registry order.
const std::vector<std::string>& registered_models();

/// Default parameters of a registered model (throws on unknown name).
std::map<std::string, double> default_parameters(std::string_view name);

/// Builds one of the registered models with parameter overrides.
///
/// Registered: holder13, power_drift, duffing_vdp, sir, lv3, brownian, ou.
/// Throws ConfigError for an unknown name, an unknown override key, or a
/// parameter outside its documented range.
ModelSpec build_model(std::string_view name,
                      const std::map<std::string, double>& overrides = {});

/// Pieces of the Lyapunov growth expression at one point.
struct LyapunovTerms {
  double drift_term = 0.0;     // <b, V_x>
  double trace = 0.0;          // tr(V_xx sigma sigma^T)
  double pairing_sq = 0.0;     // |sigma^T V_x|^2
  double quotient = 0.0;       // pairing_sq / (eta V), 0 when pairing_sq = 0
  double lhs = 0.0;            // drift_term + delta/2 trace + quotient
  double v = 0.0;
};

/// Evaluates every term; throws SingularQuotientError when V(x) = 0 with a
/// nonzero pairing. Requires a Lyapunov bundle.
LyapunovTerms lyapunov_terms(const ModelSpec& model, double t, const Vector& x);

/// Left-hand side of the Lyapunov growth inequality at (t, x).
double eval_lyapunov_expression(const ModelSpec& model, double t, const Vector& x);

}  // namespace ldp
