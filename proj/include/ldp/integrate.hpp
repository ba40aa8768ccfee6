#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "ldp/model.hpp"
#include "ldp/rng.hpp"
#include "ldp/types.hpp"

namespace ldp {

/// Uniform grid t_k = k T / K on [0, T].
class TimeGrid {
 public:
  TimeGrid() = default;  // [0, 1] with one step
  TimeGrid(double T, std::size_t K);

  double horizon() const { return T_; }
  std::size_t steps() const { return K_; }
  double dt() const { return T_ / static_cast<double>(K_); }
  double node(std::size_t k) const {
    return T_ * static_cast<double>(k) / static_cast<double>(K_);
  }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double T_ = 1.0;
  std::size_t K_ = 1;
};

enum class PathLabel { kSde, kSkeleton, kControlled };

const char* to_string(PathLabel label);

/// State trajectory on a grid: row k holds x(t_k).
struct Path {
  TimeGrid grid;
  Matrix states;  // (K+1) x d
  PathLabel label = PathLabel::kSde;

  Vector state(std::size_t k) const { return states.row(static_cast<Eigen::Index>(k)).transpose(); }
  Vector endpoint() const { return state(grid.steps()); }
};

/// Piecewise-constant control: row k holds h on [t_k, t_{k+1}).
struct Control {
  TimeGrid grid;
  Matrix values;  // K x m
  std::optional<double> bound;  // S^N membership tag

  static Control Zero(const TimeGrid& grid, int m);
  static Control Constant(const TimeGrid& grid, const Vector& h);

  /// sum_k |h_k|^2 dt
  double energy() const;

  /// True when untagged or energy() <= bound.
  bool within_bound() const;
};

/// Sinusoid family h_n(t) = sin(2 pi n t / T) v sampled at cell midpoints.
Control sinusoid_control(const TimeGrid& grid, int frequency, const Vector& direction);

/// b / (1 + dt |b|), the tamed drift used by every solver.
void tamed_drift(const ModelSpec& model, double t, const Vector& x, double dt,
                 Vector& out);

/// Tamed Euler-Maruyama path of dx = b dt + sqrt(eps) sigma dB.
///
/// Increment k of coordinate i is sqrt(dt) * standard_normal(ns, k, i).
/// Throws BlowUpError at the first non-finite state.
Path simulate_sde(const ModelSpec& model, double epsilon, const TimeGrid& grid,
                  NoiseStream ns);

inline Path simulate_sde(const ModelSpec& model, double epsilon,
                         const TimeGrid& grid, std::uint64_t seed) {
  return simulate_sde(model, epsilon, grid, NoiseStream{seed, 0});
}

/// Deterministic skeleton recursion x_{k+1} = x_k + (b_tamed + sigma h_k) dt.
Path solve_skeleton(const ModelSpec& model, const Control& control,
                    const TimeGrid& grid);

/// Controlled SDE: skeleton drift plus sqrt(eps) sigma dB.
Path simulate_controlled(const ModelSpec& model, double epsilon,
                         const Control& control, const TimeGrid& grid,
                         NoiseStream ns);

inline Path simulate_controlled(const ModelSpec& model, double epsilon,
                                const Control& control, const TimeGrid& grid,
                                std::uint64_t seed) {
  return simulate_controlled(model, epsilon, control, grid, NoiseStream{seed, 0});
}

/// Low-level stepper shared by all solvers. Writes K+1 states into `states`
/// (resized as needed); `control` may be null, `epsilon` may be 0.
void integrate_into(const ModelSpec& model, const TimeGrid& grid,
                    const Control* control, double epsilon, NoiseStream ns,
                    Matrix& states);

/// Discrete uniform metric: max_k |p_k - q_k|.
double uniform_distance(const Path& p, const Path& q);

/// CSV with header `t,x1..xd`, one row per node, 17 significant digits.
void write_path_csv(std::ostream& os, const Path& path);
Path read_path_csv(std::istream& is, PathLabel label = PathLabel::kSde);

/// CSV with header `t,h1..hm`, one row per cell (t = left node).
void write_control_csv(std::ostream& os, const Control& control);
Control read_control_csv(std::istream& is, double horizon);

/// Holds the control constant on each fine cell of a grid refined by an
/// integer factor.
Control refine_control(const Control& control, std::size_t factor);

}  // namespace ldp
