#include "ldp/action.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace ldp {

TargetSpec TargetSpec::Point(Vector z, double tolerance) {
  if (!(tolerance > 0.0)) throw ConfigError("target tolerance must be positive");
  TargetSpec t;
  t.kind = Kind::kPoint;
  t.z = std::move(z);
  t.tolerance = tolerance;
  return t;
}

TargetSpec TargetSpec::HalfSpace(Vector a, double c, double tolerance) {
  if (!(tolerance > 0.0)) throw ConfigError("target tolerance must be positive");
  if (!(a.norm() > 0.0)) throw ConfigError("half-space normal must be nonzero");
  TargetSpec t;
  t.kind = Kind::kHalfSpace;
  t.a = std::move(a);
  t.c = c;
  t.tolerance = tolerance;
  return t;
}

double TargetSpec::distance(const Vector& x) const {
  if (kind == Kind::kPoint) return (x - z).norm();
  return std::max(0.0, c - a.dot(x)) / a.norm();
}

Vector TargetSpec::distance_sq_gradient(const Vector& x) const {
  if (kind == Kind::kPoint) return 2.0 * (x - z);
  const double gap = std::max(0.0, c - a.dot(x));
  return (-2.0 * gap / a.squaredNorm()) * a;
}

Vector TargetSpec::closest_point(const Vector& x) const {
  if (kind == Kind::kPoint) return z;
  const double gap = std::max(0.0, c - a.dot(x));
  return x + (gap / a.squaredNorm()) * a;
}

const char* to_string(RateVerdict v) {
  switch (v) {
    case RateVerdict::kConverged:
      return "converged";
    case RateVerdict::kInfeasible:
      return "infeasible";
    case RateVerdict::kNotStationary:
      return "not_stationary";
  }
  return "?";
}

double RateResult::rate() const {
  return verdict == RateVerdict::kInfeasible ? std::numeric_limits<double>::infinity()
                                              : action;
}

double action_functional(const Control& control) { return 0.5 * control.energy(); }

namespace {

void check_target(const ModelSpec& model, const TargetSpec& target) {
  const Eigen::Index n = target.kind == TargetSpec::Kind::kPoint ? target.z.size()
                                                                  : target.a.size();
  if (n != model.d) throw ConfigError("target dimension does not match the model");
}

double objective_from_path(const Control& control, const Matrix& states,
                           const TargetSpec& target, double mu) {
  const Vector xT = states.row(states.rows() - 1).transpose();
  const double dist = target.distance(xT);
  return action_functional(control) + mu * dist * dist;
}

// F(x) = b_tamed(t, x) + sigma(t, x) h
void controlled_field(const ModelSpec& model, double t, const Vector& x, double dt,
                      const Eigen::Ref<const Vector>& h, Vector& out, Matrix& sig) {
  tamed_drift(model, t, x, dt, out);
  model.diffusion(t, x, sig);
  out.noalias() += sig * h;
}

}  // namespace

double penalty_objective(const ModelSpec& model, const Control& control,
                         const TargetSpec& target, double mu) {
  check_target(model, target);
  Matrix states;
  integrate_into(model, control.grid, &control, 0.0, NoiseStream{}, states);
  return objective_from_path(control, states, target, mu);
}

Matrix adjoint_gradient(const ModelSpec& model, const Control& control,
                        const TargetSpec& target, double mu, double fd_step) {
  check_target(model, target);
  const TimeGrid& grid = control.grid;
  const std::size_t K = grid.steps();
  const double dt = grid.dt();
  const int d = model.d;

  Matrix states;
  integrate_into(model, grid, &control, 0.0, NoiseStream{}, states);

  Matrix grad(static_cast<Eigen::Index>(K), model.m);
  Vector lambda = mu * target.distance_sq_gradient(states.row(static_cast<Eigen::Index>(K)).transpose());
  Vector x(d), xp(d), xm(d), fp(d), fm(d), f(d), p(d), next(d);
  Matrix sig(d, model.m), scratch(d, model.m);

  for (std::size_t kk = K; kk-- > 0;) {
    const auto k = static_cast<Eigen::Index>(kk);
    const double t = grid.node(kk);
    x = states.row(k).transpose();
    const auto h = control.values.row(k).transpose();

    // Projection Jacobian at the pre-projection state.
    controlled_field(model, t, x, dt, h, f, sig);
    p = lambda;
    if (model.domain == Domain::kNonnegativeOrthant) {
      const Vector pre = x + f * dt;
      for (int i = 0; i < d; ++i) {
        if (pre(i) < 0.0) p(i) = 0.0;
      }
    }

    grad.row(k) = (dt * h + dt * sig.transpose() * p).transpose();

    next = p;
    for (int j = 0; j < d; ++j) {
      const double step = fd_step * std::max(1.0, std::abs(x(j)));
      xp = x;
      xm = x;
      xp(j) += step;
      xm(j) -= step;
      controlled_field(model, t, xp, dt, h, fp, scratch);
      controlled_field(model, t, xm, dt, h, fm, scratch);
      next(j) += dt * p.dot(fp - fm) / (xp(j) - xm(j));
    }
    lambda = next;
  }
  return grad;
}

namespace {

struct Evaluation {
  double value = std::numeric_limits<double>::infinity();
  double terminal_error = std::numeric_limits<double>::infinity();
};

Evaluation evaluate(const ModelSpec& model, const Control& control,
                    const TargetSpec& target, double mu) {
  Evaluation e;
  Matrix states;
  try {
    integrate_into(model, control.grid, &control, 0.0, NoiseStream{}, states);
  } catch (const BlowUpError&) {
    return e;
  }
  const Vector xT = states.row(states.rows() - 1).transpose();
  e.terminal_error = target.distance(xT);
  e.value = action_functional(control) + mu * e.terminal_error * e.terminal_error;
  return e;
}

double stationarity_norm(const Matrix& grad, double dt) {
  return grad.norm() / std::sqrt(dt);
}

using Flat = Eigen::Map<Vector>;
using ConstFlat = Eigen::Map<const Vector>;

// One penalty stage of limited-memory BFGS with Armijo backtracking.
// Returns iterations used; `control` holds the final iterate.
std::size_t lbfgs_stage(const ModelSpec& model, const TargetSpec& target, double mu,
                        const OptimizerOptions& opts, Control& control) {
  const double dt = control.grid.dt();
  const Eigen::Index n = control.values.size();
  std::deque<std::pair<Vector, Vector>> memory;

  Matrix g_mat = adjoint_gradient(model, control, target, mu, opts.fd_step);
  Vector g = ConstFlat(g_mat.data(), n);
  double f = evaluate(model, control, target, mu).value;
  double h0 = 1.0 / dt;

  std::size_t it = 0;
  for (; it < opts.max_iterations; ++it) {
    if (stationarity_norm(g_mat, dt) <= opts.gtol) break;

    // Two-loop recursion.
    Vector q = -g;
    std::vector<double> alpha(memory.size());
    for (std::size_t i = memory.size(); i-- > 0;) {
      const auto& [s, y] = memory[i];
      alpha[i] = s.dot(q) / y.dot(s);
      q -= alpha[i] * y;
    }
    q *= h0;
    for (std::size_t i = 0; i < memory.size(); ++i) {
      const auto& [s, y] = memory[i];
      const double beta = y.dot(q) / y.dot(s);
      q += (alpha[i] - beta) * s;
    }
    double slope = g.dot(q);
    if (!(slope < 0.0)) {
      memory.clear();
      q = -g / dt;
      slope = g.dot(q);
    }

    Control trial = control;
    double step = 1.0;
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      Flat(trial.values.data(), n) = ConstFlat(control.values.data(), n) + step * q;
      f_new = evaluate(model, trial, target, mu).value;
      if (f_new <= f + opts.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    Matrix g_new_mat = adjoint_gradient(model, trial, target, mu, opts.fd_step);
    Vector g_new = ConstFlat(g_new_mat.data(), n);
    Vector s = step * q;
    Vector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      h0 = sy / y.squaredNorm();
      memory.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(memory.size()) > opts.memory) memory.pop_front();
    }
    control = std::move(trial);
    g = std::move(g_new);
    g_mat = std::move(g_new_mat);
    f = f_new;
  }
  return it;
}

RateResult run_penalty(const ModelSpec& model, const TargetSpec& target,
                       const OptimizerOptions& opts, Control control) {
  RateResult r;
  double mu = opts.mu_initial;
  Evaluation e;
  for (;;) {
    r.iterations += lbfgs_stage(model, target, mu, opts, control);
    e = evaluate(model, control, target, mu);
    if (e.terminal_error <= target.tolerance || mu * opts.mu_factor > opts.mu_max) break;
    mu *= opts.mu_factor;
  }
  r.penalty_final = mu;
  r.terminal_error = e.terminal_error;
  r.action = action_functional(control);
  r.stationarity = stationarity_norm(
      adjoint_gradient(model, control, target, mu, opts.fd_step), control.grid.dt());
  const bool feasible = r.terminal_error <= target.tolerance;
  r.converged = feasible && r.stationarity <= opts.gtol;
  r.verdict = !feasible ? RateVerdict::kInfeasible
              : r.converged ? RateVerdict::kConverged
                            : RateVerdict::kNotStationary;
  r.control = std::move(control);
  return r;
}

bool better(const RateResult& a, const RateResult& b, double tol) {
  const bool fa = a.terminal_error <= tol;
  const bool fb = b.terminal_error <= tol;
  if (fa != fb) return fa;
  if (fa) return a.action < b.action;
  return a.terminal_error < b.terminal_error;
}

}  // namespace

RateResult minimize_endpoint_action(const ModelSpec& model, const TargetSpec& target,
                                    const TimeGrid& grid, const OptimizerOptions& opts) {
  check_target(model, target);
  if (!(opts.mu_initial > 0.0) || !(opts.mu_factor > 1.0)) {
    throw ConfigError("penalty schedule needs mu_initial > 0 and mu_factor > 1");
  }
  RateResult best = run_penalty(model, target, opts, Control::Zero(grid, model.m));

  if (opts.restart && model.m == model.d) {
    const Matrix sig = model.diffusion_at(0.0, model.x0);
    Eigen::FullPivLU<Matrix> lu(sig);
    const Vector gap = target.closest_point(model.x0) - model.x0;
    if (lu.isInvertible() && gap.norm() > 0.0) {
      const Vector h = lu.solve(gap / grid.horizon());
      RateResult alt = run_penalty(model, target, opts, Control::Constant(grid, h));
      alt.iterations += best.iterations;
      if (better(alt, best, target.tolerance)) {
        best = std::move(alt);
      } else {
        best.iterations = alt.iterations;
      }
    }
  }
  return best;
}

RefinementStudy rate_with_refinement(const ModelSpec& model, const TargetSpec& target,
                                     const TimeGrid& grid, const OptimizerOptions& opts) {
  RefinementStudy out;
  out.coarse = minimize_endpoint_action(model, target, grid, opts);
  out.fine = minimize_endpoint_action(model, target,
                                      TimeGrid(grid.horizon(), 2 * grid.steps()), opts);
  return out;
}

Table rate_table(const RateResult& r) {
  Table t;
  t.header = {"action", "terminal_error", "iterations", "converged",
              "penalty_final", "verdict", "stationarity"};
  t.add_row({format_double(r.action), format_double(r.terminal_error),
             std::to_string(r.iterations), r.converged ? "true" : "false",
             format_double(r.penalty_final), to_string(r.verdict),
             format_double(r.stationarity)});
  return t;
}

}  // namespace ldp
