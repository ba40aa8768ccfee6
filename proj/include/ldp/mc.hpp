#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "ldp/integrate.hpp"
#include "ldp/model.hpp"
#include "ldp/table.hpp"

namespace ldp {

/// Measurable path event: terminal half-space {<a, x(T)> >= c} or exit from
/// the ball {sup_t |x(t)| >= R}.
struct EventSpec {
  enum class Kind { kEndpointHalfSpace, kExitBall };

  Kind kind = Kind::kEndpointHalfSpace;
  Vector a;
  double c = 0.0;
  double radius = 0.0;

  static EventSpec EndpointHalfSpace(Vector a, double c);
  static EventSpec ExitBall(double radius);

  bool operator()(const Matrix& states) const;
  bool operator()(const Path& path) const { return (*this)(path.states); }
};

struct MCEstimate {
  double epsilon = 0.0;
  std::size_t n = 0;
  std::size_t hits = 0;
  std::size_t blowups = 0;
  double p_hat = 0.0;
  double std_err = 0.0;
  std::optional<double> eps_log_p;  // absent when hits == 0
  /// One-sided 95% upper bound on p when hits == 0: 1 - 0.05^(1/n).
  double zero_hit_bound = 0.0;

  bool valid() const { return blowups == 0; }
};

struct HitCount {
  std::size_t hits = 0;
  std::size_t blowups = 0;
};

/// Hits among samples [first, first + count) of `seed`; sample j uses noise
/// stream (seed, j). Blow-up paths are counted apart from hits.
HitCount count_hits(const ModelSpec& model, const EventSpec& event, double epsilon,
                    const TimeGrid& grid, std::uint64_t seed, std::size_t first,
                    std::size_t count, unsigned threads = 1);

MCEstimate make_estimate(double epsilon, std::size_t n, HitCount counts);

/// One estimate per epsilon, in input order. The same substreams are reused
/// for every epsilon.
std::vector<MCEstimate> estimate_rare_event(const ModelSpec& model, const EventSpec& event,
                                            const std::vector<double>& eps_list,
                                            std::size_t n, const TimeGrid& grid,
                                            std::uint64_t seed, unsigned threads = 1);

struct LdpRow {
  MCEstimate estimate;
  double neg_rate = 0.0;
  std::optional<double> gap;  // eps log p_hat + rate, absent for zero hits
};

/// Compares eps log p_hat against -rate_value for each epsilon.
std::vector<LdpRow> ldp_scaling_report(const ModelSpec& model, const EventSpec& event,
                                       const std::vector<double>& eps_list, std::size_t n,
                                       const TimeGrid& grid, std::uint64_t seed,
                                       double rate_value, unsigned threads = 1);

Table ldp_table(const std::vector<LdpRow>& rows);

struct ConvergenceOptions {
  double exit_radius = 10.0;           // R for tau_R
  std::optional<double> passage_level;  // p for tau_p; defaults to delta^2
  unsigned threads = 1;
  /// Optional per-sample control (sample index -> control); replaces the
  /// fixed control for Y while Z stays the skeleton of the fixed control.
  std::function<Control(std::size_t)> perturbation;
};

struct ConvergenceRow {
  double epsilon = 0.0;
  std::size_t n = 0;
  std::size_t blowups = 0;
  double fraction_exceeding = 0.0;  // P(rho(Y, Z) > delta)
  double mean_rho = 0.0;
  double max_rho = 0.0;
  double fraction_exit = 0.0;      // samples with tau_R <= T
  double fraction_passage = 0.0;   // samples with tau_p <= T
  double mean_passage_time = 0.0;  // mean tau_p over samples that reached p
};

/// Distance between the controlled SDE and its skeleton for decreasing
/// epsilon.
std::vector<ConvergenceRow> convergence_statement_ii(const ModelSpec& model,
                                                     const Control& control,
                                                     const std::vector<double>& eps_list,
                                                     double delta, std::size_t n,
                                                     const TimeGrid& grid, std::uint64_t seed,
                                                     const ConvergenceOptions& opts = {});

Table convergence_table(const std::vector<ConvergenceRow>& rows);

/// (index, uniform distance between the skeletons of h_n and of the limit).
std::vector<std::pair<int, double>> weak_convergence_statement_i(
    const ModelSpec& model, const std::vector<std::pair<int, Control>>& family,
    const Control& limit, const TimeGrid& grid);

Table weak_convergence_table(const std::vector<std::pair<int, double>>& rows);

}  // namespace ldp
