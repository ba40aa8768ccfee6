#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ldp/model.hpp"
#include "ldp/modulus.hpp"
#include "ldp/table.hpp"

namespace ldp {

enum class AssumptionTag {
  kIntegrability,
  kMonotonicity,
  kLyapunov,
  kTraceNonneg,
  kRatioEta,
  kRatioGamma,
};

const char* to_string(AssumptionTag tag);

/// Worst case of a sampled inequality LHS - RHS <= tolerance.
struct AuditReport {
  AssumptionTag assumption = AssumptionTag::kMonotonicity;
  std::size_t samples = 0;
  double worst_margin = 0.0;
  /// Input achieving worst_margin. Monotonicity: (s, x, y); Lyapunov and
  /// trace: (s, x); ratio: (c, s).
  std::vector<double> worst_point;
  double tolerance = 0.0;
  bool passed = false;
  /// Points skipped because V(x) = 0 with a nonzero diffusion pairing.
  std::size_t excluded = 0;
  /// Audit-specific headline value (ratio audits: the supremum found on the
  /// finest grid; integrability: the integral).
  double statistic = 0.0;
};

/// Randomly shifted Halton points in [0,1)^dim. Point i is a pure function of
/// (seed, i), so prefixes are shared across sample-size doublings.
class HaltonSampler {
 public:
  HaltonSampler(int dim, std::uint64_t seed);
  void point(std::uint64_t index, std::vector<double>& out) const;
  int dim() const { return static_cast<int>(shift_.size()); }

 private:
  std::vector<double> shift_;
};

/// 2<x-y, b(s,x)-b(s,y)> + ||sigma(s,x)-sigma(s,y)||^2 - g(s) eta_R(|x-y|^2).
double monotonicity_margin(const ModelSpec& model, double R, double s,
                           const Vector& x, const Vector& y);

/// Samples n_pairs quasi-random (s, x, y) with |x| v |y| <= R,
/// |x - y| <= eps0, both in the model domain; reports the largest margin.
AuditReport audit_monotonicity(const ModelSpec& model, double R,
                               std::size_t n_pairs, std::uint64_t seed,
                               double tol, unsigned threads = 1);

/// First report: LHS - f(s)(1 + gamma(V(x))) <= tol. Second report:
/// -tr(V_xx sigma sigma^T) <= tol. Points are sampled in the domain
/// intersected with the ball of radius `region_radius`.
std::pair<AuditReport, AuditReport> audit_lyapunov(const ModelSpec& model,
                                                   double region_radius,
                                                   std::size_t n_points,
                                                   std::uint64_t seed, double tol,
                                                   unsigned threads = 1);

/// Lyapunov margin at one point (throws SingularQuotientError).
double lyapunov_margin(const ModelSpec& model, double s, const Vector& x);

/// Relative change allowed between successive grid refinements.
inline constexpr double kRatioGrowthTolerance = 0.01;

/// sup of c spec(s) / spec(c s) over geometric grids c in [2^-10, 1],
/// s in [cap 1e-9, cap], evaluated on three nested refinements. The report's
/// statistic is the finest-grid sup; worst_margin is the largest relative
/// change between refinements and must stay below kRatioGrowthTolerance.
AuditReport audit_ratio(const Modulus& spec, double domain_cap,
                        std::size_t n_c, std::size_t n_s,
                        AssumptionTag tag = AssumptionTag::kRatioGamma);

/// Trapezoid estimate of int_0^T sup_{|x|<=R} (|b| + ||sigma||^2) ds with
/// n_t nodes and n_x points per node (half on the sphere |x| = R).
/// Throws AuditError naming (s, x) for a non-finite sample.
double audit_integrability(const ModelSpec& model, double R, std::size_t n_t,
                           std::size_t n_x, std::uint64_t seed);

/// One CSV row per report: assumption, samples, worst_margin, tolerance,
/// passed, excluded, statistic, worst_point (space separated).
Table audit_table(const std::vector<AuditReport>& reports);

std::string audit_summary(const std::vector<AuditReport>& reports);

}  // namespace ldp
