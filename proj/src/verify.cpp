#include "ldp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "ldp/parallel.hpp"
#include "ldp/rng.hpp"

namespace ldp {

namespace {

std::vector<unsigned> first_primes(int count) {
  std::vector<unsigned> primes;
  for (unsigned n = 2; static_cast<int>(primes.size()) < count; ++n) {
    bool prime = true;
    for (unsigned p : primes) {
      if (p * p > n) break;
      if (n % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(n);
  }
  return primes;
}

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

// Worst sample so far; ties keep the smaller index so the reduction does not
// depend on how samples were split across workers.
struct Worst {
  double margin = -std::numeric_limits<double>::infinity();
  std::size_t index = std::numeric_limits<std::size_t>::max();

  void offer(double m, std::size_t i) {
    if (m > margin || (m == margin && i < index)) {
      margin = m;
      index = i;
    }
  }
  void merge(const Worst& o) { offer(o.margin, o.index); }
};

// Point of the ball of radius `radius` from d+1 unit coordinates: the first
// picks the radius (r^(1/d) for a uniform volume), the rest a direction via
// inverse-normal transforms. On the orthant the direction is folded.
Vector ball_point(const double* u, int d, double radius, Domain domain, bool on_sphere) {
  Vector g(d);
  for (int i = 0; i < d; ++i) {
    const double p = std::clamp(u[i + 1], 1e-12, 1.0 - 1e-12);
    g(i) = std::sqrt(2.0) * boost::math::erf_inv(2.0 * p - 1.0);
  }
  double n = g.norm();
  if (n == 0.0) {
    g.setZero();
    g(0) = 1.0;
    n = 1.0;
  }
  if (domain == Domain::kNonnegativeOrthant) g = g.cwiseAbs();
  const double r = on_sphere ? radius : radius * std::pow(u[0], 1.0 / d);
  return (r / n) * g;
}

AuditReport make_report(AssumptionTag tag, std::size_t samples, const Worst& w,
                        std::vector<double> point, double tol) {
  AuditReport rep;
  rep.assumption = tag;
  rep.samples = samples;
  rep.worst_margin = w.margin;
  rep.worst_point = std::move(point);
  rep.tolerance = tol;
  rep.passed = samples > 0 && w.margin <= tol;
  rep.statistic = w.margin;
  return rep;
}

std::vector<double> concat(double s, const Vector& x) {
  std::vector<double> out{s};
  out.insert(out.end(), x.data(), x.data() + x.size());
  return out;
}

}  // namespace

const char* to_string(AssumptionTag tag) {
  switch (tag) {
    case AssumptionTag::kIntegrability:
      return "integrability";
    case AssumptionTag::kMonotonicity:
      return "monotonicity";
    case AssumptionTag::kLyapunov:
      return "lyapunov";
    case AssumptionTag::kTraceNonneg:
      return "trace_nonneg";
    case AssumptionTag::kRatioEta:
      return "ratio_eta";
    case AssumptionTag::kRatioGamma:
      return "ratio_gamma";
  }
  return "?";
}

HaltonSampler::HaltonSampler(int dim, std::uint64_t seed) : shift_(dim) {
  for (int i = 0; i < dim; ++i) {
    shift_[i] = uniform01(NoiseStream{seed, 0xA0D17ull}, 0, static_cast<std::uint32_t>(i));
  }
}

void HaltonSampler::point(std::uint64_t index, std::vector<double>& out) const {
  static const std::vector<unsigned> primes = first_primes(64);
  const int dim = this->dim();
  if (dim > static_cast<int>(primes.size())) throw ConfigError("Halton dimension too large");
  out.resize(dim);
  for (int i = 0; i < dim; ++i) {
    double v = radical_inverse(index + 1, primes[i]) + shift_[i];
    out[i] = v - std::floor(v);
  }
}

double monotonicity_margin(const ModelSpec& model, double R, double s,
                           const Vector& x, const Vector& y) {
  if (!model.monotonicity) throw ConfigError(model.name + ": model has no monotonicity bundle");
  const MonotonicityBundle& mb = *model.monotonicity;
  const Vector diff = x - y;
  const double lhs = 2.0 * diff.dot(model.drift_at(s, x) - model.drift_at(s, y)) +
                     (model.diffusion_at(s, x) - model.diffusion_at(s, y)).squaredNorm();
  return lhs - mb.g_weight(s) * mb.eta_R(R, diff.squaredNorm());
}

AuditReport audit_monotonicity(const ModelSpec& model, double R, std::size_t n_pairs,
                               std::uint64_t seed, double tol, unsigned threads) {
  if (!model.monotonicity) throw ConfigError(model.name + ": model has no monotonicity bundle");
  if (!(R > 0.0)) throw ConfigError("audit_monotonicity: R must be positive");
  const int d = model.d;
  const double eps0 = model.monotonicity->eps0;
  const HaltonSampler sampler(2 * (d + 1) + 1, seed);

  struct Pair {
    double s;
    Vector x, y;
  };
  std::vector<Pair> pairs;
  pairs.reserve(n_pairs);
  std::vector<double> u;
  const std::uint64_t max_candidates = 64 * static_cast<std::uint64_t>(n_pairs) + 1024;
  for (std::uint64_t i = 0; pairs.size() < n_pairs && i < max_candidates; ++i) {
    sampler.point(i, u);
    Vector x = ball_point(u.data(), d, R, model.domain, false);
    Vector v = ball_point(u.data() + d + 1, d, eps0, Domain::kWhole, false);
    Vector y = x + v;
    if (y.norm() > R || !model.in_domain(y)) continue;
    pairs.push_back({model.T * u[2 * (d + 1)], std::move(x), std::move(y)});
  }
  if (pairs.empty()) throw AuditError("audit_monotonicity: empty feasible region");

  std::vector<Worst> partial(worker_count(pairs.size(), threads));
  parallel_chunks(pairs.size(), threads, [&](std::size_t w, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      partial[w].offer(monotonicity_margin(model, R, pairs[i].s, pairs[i].x, pairs[i].y), i);
    }
  });
  Worst worst;
  for (const auto& p : partial) worst.merge(p);
  const Pair& wp = pairs[worst.index];
  std::vector<double> point = concat(wp.s, wp.x);
  point.insert(point.end(), wp.y.data(), wp.y.data() + wp.y.size());
  return make_report(AssumptionTag::kMonotonicity, pairs.size(), worst, std::move(point), tol);
}

double lyapunov_margin(const ModelSpec& model, double s, const Vector& x) {
  const LyapunovTerms terms = lyapunov_terms(model, s, x);
  const LyapunovBundle& lb = *model.lyapunov;
  return terms.lhs - lb.f_weight(s) * (1.0 + lb.gamma(terms.v));
}

std::pair<AuditReport, AuditReport> audit_lyapunov(const ModelSpec& model,
                                                   double region_radius,
                                                   std::size_t n_points,
                                                   std::uint64_t seed, double tol,
                                                   unsigned threads) {
  if (!model.lyapunov) throw ConfigError(model.name + ": model has no Lyapunov bundle");
  if (!(region_radius > 0.0)) throw ConfigError("audit_lyapunov: radius must be positive");
  if (n_points == 0) throw ConfigError("audit_lyapunov: needs at least one point");
  const int d = model.d;
  const HaltonSampler sampler(d + 2, seed);

  struct Partial {
    Worst growth, trace;
    std::size_t excluded = 0;
  };
  std::vector<Partial> partial(worker_count(n_points, threads));
  auto sample = [&](std::size_t i, std::vector<double>& u, double& s) {
    sampler.point(i, u);
    s = model.T * u[d + 1];
    return ball_point(u.data(), d, region_radius, model.domain, false);
  };
  parallel_chunks(n_points, threads, [&](std::size_t w, std::size_t b, std::size_t e) {
    std::vector<double> u;
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) {
      const Vector x = sample(i, u, s);
      try {
        partial[w].growth.offer(lyapunov_margin(model, s, x), i);
      } catch (const SingularQuotientError&) {
        ++partial[w].excluded;
        continue;
      }
      const Matrix sig = model.diffusion_at(s, x);
      const double tr = (model.lyapunov->hessian(x) * sig * sig.transpose()).trace();
      partial[w].trace.offer(-tr, i);
    }
  });
  Partial total;
  for (const auto& p : partial) {
    total.growth.merge(p.growth);
    total.trace.merge(p.trace);
    total.excluded += p.excluded;
  }
  const std::size_t used = n_points - total.excluded;
  std::vector<double> u;
  double s = 0.0;
  std::vector<double> gp, tp;
  if (used > 0) {
    Vector x = sample(total.growth.index, u, s);
    gp = concat(s, x);
    x = sample(total.trace.index, u, s);
    tp = concat(s, x);
  }
  AuditReport growth = make_report(AssumptionTag::kLyapunov, used, total.growth, gp, tol);
  AuditReport trace = make_report(AssumptionTag::kTraceNonneg, used, total.trace, tp, tol);
  growth.excluded = trace.excluded = total.excluded;
  return {growth, trace};
}

AuditReport audit_ratio(const Modulus& spec, double domain_cap, std::size_t n_c,
                        std::size_t n_s, AssumptionTag tag) {
  if (!(domain_cap > 0.0)) throw ConfigError("audit_ratio: domain cap must be positive");
  if (n_c < 2 || n_s < 2) throw ConfigError("audit_ratio: grids need >= 2 points");
  constexpr int kLevels = 3;
  AuditReport rep;
  rep.assumption = tag;
  rep.tolerance = kRatioGrowthTolerance;

  std::vector<double> sups;
  for (int level = 0; level < kLevels; ++level) {
    const std::size_t nc = (n_c - 1) * (std::size_t{1} << level) + 1;
    const std::size_t ns = (n_s - 1) * (std::size_t{1} << level) + 1;
    double sup = -std::numeric_limits<double>::infinity();
    std::vector<double> arg;
    for (std::size_t i = 0; i < nc; ++i) {
      const double c = std::exp2(-10.0 * (1.0 - static_cast<double>(i) / (nc - 1)));
      for (std::size_t j = 0; j < ns; ++j) {
        const double s = domain_cap * std::pow(10.0, -9.0 * (1.0 - static_cast<double>(j) / (ns - 1)));
        const double den = spec(c * s);
        const double ratio = c * spec(s) / den;
        if (!(den > 0.0) || !std::isfinite(ratio)) {
          rep.samples += i * ns + j + 1;
          rep.worst_margin = std::numeric_limits<double>::infinity();
          rep.statistic = std::numeric_limits<double>::infinity();
          rep.worst_point = {c, s};
          rep.passed = false;
          return rep;
        }
        if (ratio > sup) {
          sup = ratio;
          arg = {c, s};
        }
      }
    }
    rep.samples += nc * ns;
    sups.push_back(sup);
    rep.worst_point = arg;
  }
  double growth = 0.0;
  for (int l = 1; l < kLevels; ++l) {
    growth = std::max(growth, std::abs(sups[l] - sups[l - 1]) / std::abs(sups[l - 1]));
  }
  rep.worst_margin = growth;
  rep.statistic = sups.back();
  rep.passed = growth <= rep.tolerance;
  return rep;
}

double audit_integrability(const ModelSpec& model, double R, std::size_t n_t,
                           std::size_t n_x, std::uint64_t seed) {
  if (!(R > 0.0)) throw ConfigError("audit_integrability: R must be positive");
  if (n_t < 2 || n_x < 1) throw ConfigError("audit_integrability: needs n_t >= 2, n_x >= 1");
  const int d = model.d;
  const HaltonSampler sampler(d + 1, seed);
  std::vector<Vector> points;
  points.reserve(n_x + 1);
  points.push_back(Vector::Zero(d));
  std::vector<double> u;
  for (std::size_t i = 0; i < n_x; ++i) {
    sampler.point(i, u);
    points.push_back(ball_point(u.data(), d, R, model.domain, i % 2 == 0));
  }
  std::vector<double> sup(n_t, 0.0);
  for (std::size_t k = 0; k < n_t; ++k) {
    const double s = model.T * static_cast<double>(k) / static_cast<double>(n_t - 1);
    for (const Vector& x : points) {
      const double v = model.drift_at(s, x).norm() + model.diffusion_at(s, x).squaredNorm();
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << model.name << ": non-finite coefficient at s=" << s << ", x=("
            << x.transpose() << ")";
        throw AuditError(msg.str());
      }
      sup[k] = std::max(sup[k], v);
    }
  }
  const double h = model.T / static_cast<double>(n_t - 1);
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < n_t; ++k) integral += 0.5 * h * (sup[k] + sup[k + 1]);
  return integral;
}

Table audit_table(const std::vector<AuditReport>& reports) {
  Table t;
  t.header = {"assumption", "samples", "worst_margin", "tolerance",
              "passed", "excluded", "statistic", "worst_point"};
  for (const auto& r : reports) {
    std::string point;
    for (std::size_t i = 0; i < r.worst_point.size(); ++i) {
      if (i) point += ' ';
      point += format_double(r.worst_point[i]);
    }
    t.add_row({to_string(r.assumption), std::to_string(r.samples),
               format_double(r.worst_margin), format_double(r.tolerance),
               r.passed ? "true" : "false", std::to_string(r.excluded),
               format_double(r.statistic), point});
  }
  return t;
}

std::string audit_summary(const std::vector<AuditReport>& reports) {
  std::ostringstream os;
  for (const auto& r : reports) {
    os << (r.passed ? "PASS " : "FAIL ") << to_string(r.assumption)
       << ": samples=" << r.samples << " worst_margin=" << format_double(r.worst_margin)
       << " tol=" << format_double(r.tolerance);
    if (r.excluded) os << " excluded=" << r.excluded;
    os << '\n';
  }
  return os.str();
}

}  // namespace ldp
