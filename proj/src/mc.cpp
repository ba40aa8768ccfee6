#include "ldp/mc.hpp"

#include <cmath>
#include <limits>

#include "ldp/parallel.hpp"

namespace ldp {

EventSpec EventSpec::EndpointHalfSpace(Vector a, double c) {
  EventSpec e;
  e.kind = Kind::kEndpointHalfSpace;
  e.a = std::move(a);
  e.c = c;
  return e;
}

EventSpec EventSpec::ExitBall(double radius) {
  if (!(radius > 0.0)) throw ConfigError("exit radius must be positive");
  EventSpec e;
  e.kind = Kind::kExitBall;
  e.radius = radius;
  return e;
}

bool EventSpec::operator()(const Matrix& states) const {
  if (kind == Kind::kEndpointHalfSpace) {
    if (a.size() != states.cols()) throw ConfigError("event dimension does not match the path");
    return states.row(states.rows() - 1).dot(a.transpose()) >= c;
  }
  for (Eigen::Index k = 0; k < states.rows(); ++k) {
    if (states.row(k).norm() >= radius) return true;
  }
  return false;
}

HitCount count_hits(const ModelSpec& model, const EventSpec& event, double epsilon,
                    const TimeGrid& grid, std::uint64_t seed, std::size_t first,
                    std::size_t count, unsigned threads) {
  std::vector<HitCount> partial(worker_count(count, threads));
  parallel_chunks(count, threads, [&](std::size_t w, std::size_t b, std::size_t e) {
    Matrix states;
    for (std::size_t i = b; i < e; ++i) {
      try {
        integrate_into(model, grid, nullptr, epsilon, NoiseStream{seed, first + i}, states);
      } catch (const BlowUpError&) {
        ++partial[w].blowups;
        continue;
      }
      if (event(states)) ++partial[w].hits;
    }
  });
  HitCount total;
  for (const auto& p : partial) {
    total.hits += p.hits;
    total.blowups += p.blowups;
  }
  return total;
}

MCEstimate make_estimate(double epsilon, std::size_t n, HitCount counts) {
  MCEstimate m;
  m.epsilon = epsilon;
  m.n = n;
  m.hits = counts.hits;
  m.blowups = counts.blowups;
  m.p_hat = static_cast<double>(counts.hits) / static_cast<double>(n);
  m.std_err = std::sqrt(m.p_hat * (1.0 - m.p_hat) / static_cast<double>(n));
  if (counts.hits > 0) {
    m.eps_log_p = epsilon * std::log(m.p_hat);
  } else {
    m.zero_hit_bound = 1.0 - std::pow(0.05, 1.0 / static_cast<double>(n));
  }
  return m;
}

std::vector<MCEstimate> estimate_rare_event(const ModelSpec& model, const EventSpec& event,
                                            const std::vector<double>& eps_list,
                                            std::size_t n, const TimeGrid& grid,
                                            std::uint64_t seed, unsigned threads) {
  if (n == 0) throw ConfigError("estimate_rare_event: n must be positive");
  std::vector<MCEstimate> out;
  for (double eps : eps_list) {
    if (!(eps > 0.0)) throw ConfigError("estimate_rare_event: epsilon must be positive");
    out.push_back(make_estimate(eps, n, count_hits(model, event, eps, grid, seed, 0, n, threads)));
  }
  return out;
}

std::vector<LdpRow> ldp_scaling_report(const ModelSpec& model, const EventSpec& event,
                                       const std::vector<double>& eps_list, std::size_t n,
                                       const TimeGrid& grid, std::uint64_t seed,
                                       double rate_value, unsigned threads) {
  std::vector<LdpRow> rows;
  for (auto& est : estimate_rare_event(model, event, eps_list, n, grid, seed, threads)) {
    LdpRow row;
    row.neg_rate = -rate_value;
    if (est.eps_log_p) row.gap = *est.eps_log_p + rate_value;
    row.estimate = std::move(est);
    rows.push_back(std::move(row));
  }
  return rows;
}

Table ldp_table(const std::vector<LdpRow>& rows) {
  Table t;
  t.header = {"epsilon", "n", "hits", "blowups", "p_hat", "std_err",
              "eps_log_p", "neg_rate", "gap", "zero_hit_bound"};
  for (const auto& r : rows) {
    const MCEstimate& e = r.estimate;
    t.add_row({format_double(e.epsilon), std::to_string(e.n), std::to_string(e.hits),
               std::to_string(e.blowups), format_double(e.p_hat), format_double(e.std_err),
               e.eps_log_p ? format_double(*e.eps_log_p) : "",
               format_double(r.neg_rate), r.gap ? format_double(*r.gap) : "",
               e.eps_log_p ? "" : format_double(e.zero_hit_bound)});
  }
  return t;
}

std::vector<ConvergenceRow> convergence_statement_ii(const ModelSpec& model,
                                                     const Control& control,
                                                     const std::vector<double>& eps_list,
                                                     double delta, std::size_t n,
                                                     const TimeGrid& grid, std::uint64_t seed,
                                                     const ConvergenceOptions& opts) {
  if (!(delta > 0.0)) throw ConfigError("convergence_statement_ii: delta must be positive");
  if (n == 0) throw ConfigError("convergence_statement_ii: n must be positive");
  const Path z = solve_skeleton(model, control, grid);
  const double level = opts.passage_level.value_or(delta * delta);
  constexpr double kNever = std::numeric_limits<double>::infinity();

  struct Sample {
    double rho = 0.0;
    double tau_exit = kNever;
    double tau_passage = kNever;
    bool blown = false;
  };

  std::vector<ConvergenceRow> rows;
  std::vector<Sample> samples(n);
  for (double eps : eps_list) {
    if (!(eps >= 0.0)) throw ConfigError("convergence_statement_ii: epsilon must be >= 0");
    parallel_chunks(n, opts.threads, [&](std::size_t, std::size_t b, std::size_t e) {
      Matrix y;
      for (std::size_t j = b; j < e; ++j) {
        Sample s;
        try {
          if (opts.perturbation) {
            const Control hj = opts.perturbation(j);
            integrate_into(model, grid, &hj, eps, NoiseStream{seed, j}, y);
          } else {
            integrate_into(model, grid, &control, eps, NoiseStream{seed, j}, y);
          }
        } catch (const BlowUpError&) {
          s.blown = true;
          samples[j] = s;
          continue;
        }
        for (Eigen::Index k = 0; k < y.rows(); ++k) {
          const double gap = (y.row(k) - z.states.row(k)).squaredNorm();
          s.rho = std::max(s.rho, std::sqrt(gap));
          const double t = grid.node(static_cast<std::size_t>(k));
          if (s.tau_exit == kNever && y.row(k).norm() >= opts.exit_radius) s.tau_exit = t;
          if (s.tau_passage == kNever && gap >= level) s.tau_passage = t;
        }
        samples[j] = s;
      }
    });

    // Sequential reduction keeps sums independent of the worker count.
    ConvergenceRow row;
    row.epsilon = eps;
    row.n = n;
    std::size_t exceed = 0, exits = 0, passages = 0;
    double rho_sum = 0.0, tau_sum = 0.0;
    for (const Sample& s : samples) {
      if (s.blown) {
        ++row.blowups;
        continue;
      }
      if (s.rho > delta) ++exceed;
      rho_sum += s.rho;
      row.max_rho = std::max(row.max_rho, s.rho);
      if (s.tau_exit != kNever) ++exits;
      if (s.tau_passage != kNever) {
        ++passages;
        tau_sum += s.tau_passage;
      }
    }
    const std::size_t valid = n - row.blowups;
    if (valid > 0) {
      row.fraction_exceeding = static_cast<double>(exceed) / static_cast<double>(valid);
      row.mean_rho = rho_sum / static_cast<double>(valid);
      row.fraction_exit = static_cast<double>(exits) / static_cast<double>(valid);
      row.fraction_passage = static_cast<double>(passages) / static_cast<double>(valid);
    }
    if (passages > 0) row.mean_passage_time = tau_sum / static_cast<double>(passages);
    rows.push_back(row);
  }
  return rows;
}

Table convergence_table(const std::vector<ConvergenceRow>& rows) {
  Table t;
  t.header = {"epsilon", "n", "blowups", "fraction_exceeding", "mean_rho", "max_rho",
              "fraction_exit", "fraction_passage", "mean_passage_time"};
  for (const auto& r : rows) {
    t.add_row({format_double(r.epsilon), std::to_string(r.n), std::to_string(r.blowups),
               format_double(r.fraction_exceeding), format_double(r.mean_rho),
               format_double(r.max_rho), format_double(r.fraction_exit),
               format_double(r.fraction_passage), format_double(r.mean_passage_time)});
  }
  return t;
}

std::vector<std::pair<int, double>> weak_convergence_statement_i(
    const ModelSpec& model, const std::vector<std::pair<int, Control>>& family,
    const Control& limit, const TimeGrid& grid) {
  const Path z = solve_skeleton(model, limit, grid);
  std::vector<std::pair<int, double>> rows;
  rows.reserve(family.size());
  for (const auto& [index, h] : family) {
    if (!(h.grid == grid)) throw GridMismatchError("family member grid differs from the limit grid");
    rows.emplace_back(index, uniform_distance(solve_skeleton(model, h, grid), z));
  }
  return rows;
}

Table weak_convergence_table(const std::vector<std::pair<int, double>>& rows) {
  Table t;
  t.header = {"n", "distance"};
  for (const auto& [n, dist] : rows) t.add_row({std::to_string(n), format_double(dist)});
  return t;
}

}  // namespace ldp
