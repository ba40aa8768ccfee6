#pragma once

#include <cstddef>

#include "ldp/integrate.hpp"
#include "ldp/model.hpp"
#include "ldp/table.hpp"

namespace ldp {

/// Terminal event for rate evaluation: either the point {z} or the
/// half-space {<a, x> >= c}, reached within `tolerance`.
struct TargetSpec {
  enum class Kind { kPoint, kHalfSpace };

  Kind kind = Kind::kPoint;
  Vector z;        // kPoint
  Vector a;        // kHalfSpace
  double c = 0.0;  // kHalfSpace
  double tolerance = 1e-6;

  static TargetSpec Point(Vector z, double tolerance = 1e-6);
  static TargetSpec HalfSpace(Vector a, double c, double tolerance = 1e-6);

  /// Euclidean distance from x to the target set.
  double distance(const Vector& x) const;
  /// Gradient of distance(x)^2.
  Vector distance_sq_gradient(const Vector& x) const;
  /// Closest point of the target set to x.
  Vector closest_point(const Vector& x) const;
};

struct OptimizerOptions {
  double gtol = 1e-6;             // L2 norm of the functional gradient
  std::size_t max_iterations = 500;  // per penalty stage
  double mu_initial = 1.0;
  double mu_factor = 10.0;
  double mu_max = 1e8;
  int memory = 10;                // quasi-Newton pairs
  double armijo = 1e-4;
  double fd_step = 1e-6;          // Jacobian finite-difference step
  bool restart = true;            // try the steering initial guess as well
};

enum class RateVerdict { kConverged, kInfeasible, kNotStationary };

const char* to_string(RateVerdict v);

struct RateResult {
  Control control;
  double action = 0.0;          // 1/2 control.energy()
  double terminal_error = 0.0;  // distance of x^h(T) to the target
  std::size_t iterations = 0;
  bool converged = false;
  double penalty_final = 0.0;
  double stationarity = 0.0;
  RateVerdict verdict = RateVerdict::kNotStationary;

  /// The rate value with inf{empty} = inf: action unless infeasible.
  double rate() const;
};

/// 1/2 sum_k |h_k|^2 dt.
double action_functional(const Control& control);

/// 1/2 sum_k |h_k|^2 dt + mu dist(x^h(T), target)^2.
double penalty_objective(const ModelSpec& model, const Control& control,
                         const TargetSpec& target, double mu);

/// Exact gradient of penalty_objective w.r.t. the control values via one
/// forward skeleton pass and one backward adjoint pass. Jacobians of the
/// tamed drift and of sigma h are central differences with step `fd_step`.
Matrix adjoint_gradient(const ModelSpec& model, const Control& control,
                        const TargetSpec& target, double mu, double fd_step = 1e-6);

/// Penalty-method minimum action: L-BFGS with backtracking on the penalized
/// objective, mu raised geometrically until the terminal error meets the
/// target tolerance or mu exceeds opts.mu_max.
RateResult minimize_endpoint_action(const ModelSpec& model, const TargetSpec& target,
                                    const TimeGrid& grid, const OptimizerOptions& opts = {});

/// Rate on grid K and on 2K, for judging discretization bias.
struct RefinementStudy {
  RateResult coarse;
  RateResult fine;
  double delta() const { return fine.action - coarse.action; }
};

RefinementStudy rate_with_refinement(const ModelSpec& model, const TargetSpec& target,
                                     const TimeGrid& grid, const OptimizerOptions& opts = {});

/// Columns: action, terminal_error, iterations, converged, penalty_final,
/// verdict, stationarity.
Table rate_table(const RateResult& result);

}  // namespace ldp
