#include "ldp/integrate.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include "ldp/table.hpp"

namespace ldp {

TimeGrid::TimeGrid(double T, std::size_t K) : T_(T), K_(K) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("grid horizon must be positive");
  if (K == 0) throw ConfigError("grid needs at least one step");
}

const char* to_string(PathLabel label) {
  switch (label) {
    case PathLabel::kSde:
      return "sde";
    case PathLabel::kSkeleton:
      return "skeleton";
    case PathLabel::kControlled:
      return "controlled";
  }
  return "?";
}

Control Control::Zero(const TimeGrid& grid, int m) {
  return Control{grid, Matrix::Zero(static_cast<Eigen::Index>(grid.steps()), m), std::nullopt};
}

Control Control::Constant(const TimeGrid& grid, const Vector& h) {
  Matrix v(static_cast<Eigen::Index>(grid.steps()), h.size());
  v.rowwise() = h.transpose();
  return Control{grid, std::move(v), std::nullopt};
}

double Control::energy() const {
  double e = 0.0;
  for (Eigen::Index k = 0; k < values.rows(); ++k) e += values.row(k).squaredNorm();
  return e * grid.dt();
}

bool Control::within_bound() const { return !bound || energy() <= *bound; }

Control sinusoid_control(const TimeGrid& grid, int frequency, const Vector& direction) {
  Control c = Control::Zero(grid, static_cast<int>(direction.size()));
  const double w = 2.0 * std::numbers::pi * frequency / grid.horizon();
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const double mid = grid.node(k) + 0.5 * grid.dt();
    c.values.row(static_cast<Eigen::Index>(k)) = std::sin(w * mid) * direction.transpose();
  }
  return c;
}

void tamed_drift(const ModelSpec& model, double t, const Vector& x, double dt,
                 Vector& out) {
  model.drift(t, x, out);
  out /= 1.0 + dt * out.norm();
}

void integrate_into(const ModelSpec& model, const TimeGrid& grid,
                    const Control* control, double epsilon, NoiseStream ns,
                    Matrix& states) {
  if (epsilon < 0.0) throw ConfigError("epsilon must be nonnegative");
  if (control) {
    if (!(control->grid == grid)) throw GridMismatchError("control grid differs from solver grid");
    if (control->values.cols() != model.m) throw ConfigError("control has wrong width");
  }
  const std::size_t K = grid.steps();
  const double dt = grid.dt();
  const double noise_scale = std::sqrt(epsilon) * std::sqrt(dt);
  const bool need_sigma = control != nullptr || epsilon > 0.0;

  states.resize(static_cast<Eigen::Index>(K + 1), model.d);
  Vector x = model.x0;
  states.row(0) = x.transpose();
  Vector incr(model.d);
  Matrix sig(model.d, model.m);
  Vector dB(model.m);

  for (std::size_t k = 0; k < K; ++k) {
    const double t = grid.node(k);
    tamed_drift(model, t, x, dt, incr);
    if (need_sigma) model.diffusion(t, x, sig);
    if (control) {
      incr.noalias() += sig * control->values.row(static_cast<Eigen::Index>(k)).transpose();
    }
    x += incr * dt;
    if (epsilon > 0.0) {
      for (int i = 0; i < model.m; ++i) {
        dB(i) = noise_scale * standard_normal(ns, static_cast<std::uint32_t>(k),
                                              static_cast<std::uint32_t>(i));
      }
      x.noalias() += sig * dB;
    }
    model.project(x);
    if (!x.allFinite()) {
      throw BlowUpError(k, model.name + ": non-finite state at step " + std::to_string(k));
    }
    states.row(static_cast<Eigen::Index>(k + 1)) = x.transpose();
  }
}

Path simulate_sde(const ModelSpec& model, double epsilon, const TimeGrid& grid,
                  NoiseStream ns) {
  Path p{grid, {}, PathLabel::kSde};
  integrate_into(model, grid, nullptr, epsilon, ns, p.states);
  return p;
}

Path solve_skeleton(const ModelSpec& model, const Control& control,
                    const TimeGrid& grid) {
  Path p{grid, {}, PathLabel::kSkeleton};
  integrate_into(model, grid, &control, 0.0, NoiseStream{}, p.states);
  return p;
}

Path simulate_controlled(const ModelSpec& model, double epsilon,
                         const Control& control, const TimeGrid& grid,
                         NoiseStream ns) {
  Path p{grid, {}, PathLabel::kControlled};
  integrate_into(model, grid, &control, epsilon, ns, p.states);
  return p;
}

double uniform_distance(const Path& p, const Path& q) {
  if (!(p.grid == q.grid)) throw GridMismatchError("paths live on different grids");
  if (p.states.cols() != q.states.cols()) throw GridMismatchError("paths differ in dimension");
  double worst = 0.0;
  for (Eigen::Index k = 0; k < p.states.rows(); ++k) {
    worst = std::max(worst, (p.states.row(k) - q.states.row(k)).norm());
  }
  return worst;
}

namespace {

Table indexed_table(const TimeGrid& grid, const Matrix& values, char prefix,
                    std::size_t rows) {
  Table t;
  t.header.push_back("t");
  for (Eigen::Index i = 0; i < values.cols(); ++i) {
    t.header.push_back(prefix + std::to_string(i + 1));
  }
  for (std::size_t k = 0; k < rows; ++k) {
    std::vector<std::string> row{format_double(grid.node(k))};
    for (Eigen::Index i = 0; i < values.cols(); ++i) {
      row.push_back(format_double(values(static_cast<Eigen::Index>(k), i)));
    }
    t.add_row(std::move(row));
  }
  return t;
}

Matrix table_values(const Table& t) {
  Matrix v(static_cast<Eigen::Index>(t.rows.size()),
           static_cast<Eigen::Index>(t.header.size()) - 1);
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    for (std::size_t i = 1; i < t.header.size(); ++i) {
      v(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i) - 1) =
          parse_double(t.rows[k][i]);
    }
  }
  return v;
}

}  // namespace

void write_path_csv(std::ostream& os, const Path& path) {
  write_csv(os, indexed_table(path.grid, path.states, 'x', path.grid.steps() + 1));
}

Path read_path_csv(std::istream& is, PathLabel label) {
  const Table t = read_csv(is);
  if (t.rows.size() < 2 || t.header.size() < 2) throw Error("path CSV needs >= 2 rows and a state column");
  const double T = parse_double(t.rows.back()[0]);
  return Path{TimeGrid(T, t.rows.size() - 1), table_values(t), label};
}

void write_control_csv(std::ostream& os, const Control& control) {
  write_csv(os, indexed_table(control.grid, control.values, 'h', control.grid.steps()));
}

Control read_control_csv(std::istream& is, double horizon) {
  const Table t = read_csv(is);
  if (t.rows.empty() || t.header.size() < 2) throw Error("control CSV needs rows and a control column");
  return Control{TimeGrid(horizon, t.rows.size()), table_values(t), std::nullopt};
}

Control refine_control(const Control& control, std::size_t factor) {
  if (factor == 0) throw ConfigError("refinement factor must be positive");
  const TimeGrid fine(control.grid.horizon(), control.grid.steps() * factor);
  Control out = Control::Zero(fine, static_cast<int>(control.values.cols()));
  for (std::size_t k = 0; k < fine.steps(); ++k) {
    out.values.row(static_cast<Eigen::Index>(k)) =
        control.values.row(static_cast<Eigen::Index>(k / factor));
  }
  out.bound = control.bound;
  return out;
}

}  // namespace ldp
