#include "ldp/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ldp {

namespace {

using Params = std::map<std::string, double>;

constexpr double kPowerDriftFloor = 1e-8;

double real_cbrt(double x) { return std::cbrt(x); }

TimeWeight constant_weight(double c) {
  return [c](double) { return c; };
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

double param(const Params& p, const std::string& key) { return p.at(key); }

// |x|^2 with derivatives, shared by several registered bundles.
LyapunovBundle squared_norm_bundle(int d, double delta, double eta, double f) {
  LyapunovBundle v;
  v.value = [](const Vector& x) { return x.squaredNorm(); };
  v.gradient = [](const Vector& x) -> Vector { return 2.0 * x; };
  v.hessian = [d](const Vector&) -> Matrix {
    return 2.0 * Matrix::Identity(d, d);
  };
  v.delta = delta;
  v.eta = eta;
  v.f_weight = constant_weight(f);
  v.gamma = Modulus::Linear(1.0);
  return v;
}

MonotonicityBundle holder_monotonicity(double eps0) {
  MonotonicityBundle mb;
  mb.eps0 = eps0;
  mb.g_weight = constant_weight(1.0);
  mb.eta_for_radius = [](double R) { return Modulus::XLog1OverX(R); };
  return mb;
}

// eta_R(s) = L_R s where L_R(R) bounds 2 Lip(b) + Lip(sigma)^2 on the ball.
MonotonicityBundle lipschitz_monotonicity(double eps0,
                                          std::function<double(double)> lr) {
  MonotonicityBundle mb;
  mb.eps0 = eps0;
  mb.g_weight = constant_weight(1.0);
  mb.eta_for_radius = [lr = std::move(lr)](double R) {
    return Modulus::Linear(lr(R));
  };
  return mb;
}

void check_common(const Params& p) {
  require(p.at("T") > 0.0, "T must be positive");
  require(p.at("delta") > 0.0, "delta must be positive");
  require(p.at("eta") > 0.0, "eta must be positive");
  require(p.at("eps0") > 0.0 && p.at("eps0") < 1.0, "eps0 must lie in (0,1)");
}

Params common_defaults(double delta, double eta) {
  return {{"T", 1.0}, {"delta", delta}, {"eta", eta}, {"eps0", 0.5}};
}

Vector read_x0(const Params& p, int d) {
  Vector x0 = Vector::Zero(d);
  for (int i = 0; i < d; ++i) {
    auto it = p.find("x0_" + std::to_string(i + 1));
    if (it != p.end()) x0(i) = it->second;
  }
  return x0;
}

ModelSpec make_holder13(const Params& p) {
  ModelSpec s;
  s.d = 1;
  s.m = 1;
  s.drift = [](double, const Vector& x, Vector& out) {
    out.resize(1);
    out(0) = -real_cbrt(x(0));
  };
  s.diffusion = [](double, const Vector& x, Matrix& out) {
    out.resize(1, 1);
    const double c = real_cbrt(x(0));
    out(0, 0) = c * c;
  };
  s.lyapunov = squared_norm_bundle(1, param(p, "delta"), param(p, "eta"), 1.0);
  s.monotonicity = holder_monotonicity(param(p, "eps0"));
  return s;
}

ModelSpec make_power_drift(const Params& p) {
  const double alpha = param(p, "alpha");
  const double sig = param(p, "sigma");
  const double dim = param(p, "dim");
  require(alpha > 0.0 && alpha < 1.0, "power_drift: alpha must lie in (0,1)");
  require(sig >= 0.0, "power_drift: sigma must be >= 0");
  require(dim >= 1.0 && dim == std::floor(dim) && dim <= 16.0,
          "power_drift: dim must be an integer in [1,16]");
  const int d = static_cast<int>(dim);
  ModelSpec s;
  s.d = d;
  s.m = d;
  s.drift = [alpha](double, const Vector& x, Vector& out) {
    const double r = std::max(x.norm(), kPowerDriftFloor);
    out = -x * std::pow(r, -alpha);
  };
  s.diffusion = [sig, d](double, const Vector&, Matrix& out) {
    out = sig * Matrix::Identity(d, d);
  };
  const double delta = param(p, "delta");
  const double eta = param(p, "eta");
  // <b, 2x> <= 0, so the bound is the constant diffusion part.
  const double f = delta * sig * sig * d + 4.0 * sig * sig / eta;
  s.lyapunov = squared_norm_bundle(d, delta, eta, f);
  s.monotonicity = holder_monotonicity(param(p, "eps0"));
  return s;
}

ModelSpec make_duffing(const Params& p) {
  const double a1 = param(p, "alpha1");
  const double a2 = param(p, "alpha2");
  const double a3 = param(p, "alpha3");
  const double e0 = param(p, "eta0");
  const double e1 = param(p, "eta1");
  require(a1 > 0.0 && a2 > 0.0 && a3 > 0.0,
          "duffing_vdp: alpha1, alpha2, alpha3 must be positive");
  require(e0 > 0.0 && e1 > 0.0, "duffing_vdp: eta0, eta1 must be positive");
  ModelSpec s;
  s.d = 2;
  s.m = 1;
  s.drift = [a1, a2, a3](double, const Vector& x, Vector& out) {
    out.resize(2);
    const double x1 = x(0), x2 = x(1);
    out(0) = x2;
    out(1) = a2 * x2 - a1 * x1 - a3 * x1 * x1 * x2 - x1 * x1 * x1;
  };
  s.diffusion = [e0, e1](double, const Vector& x, Matrix& out) {
    out.resize(2, 1);
    const double x1sq = x(0) * x(0);
    out(0, 0) = 0.0;
    out(1, 0) = std::sqrt(e0 + e1 * x1sq * x1sq);
  };

  LyapunovBundle v;
  v.value = [a1](const Vector& x) {
    const double x1sq = x(0) * x(0);
    return 0.5 * x1sq * x1sq + a1 * x1sq + x(1) * x(1);
  };
  v.gradient = [a1](const Vector& x) -> Vector {
    Vector g(2);
    g(0) = 2.0 * x(0) * x(0) * x(0) + 2.0 * a1 * x(0);
    g(1) = 2.0 * x(1);
    return g;
  };
  v.hessian = [a1](const Vector& x) -> Matrix {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = 6.0 * x(0) * x(0) + 2.0 * a1;
    h(1, 1) = 2.0;
    return h;
  };
  v.delta = param(p, "delta");
  v.eta = param(p, "eta");
  v.f_weight = constant_weight(5.0 * e0 + 10.0 * e1 + 2.0 * a2);
  v.gamma = Modulus::Linear(1.0);
  s.lyapunov = v;

  s.monotonicity = lipschitz_monotonicity(param(p, "eps0"), [=](double R) {
    const double j21 = a1 + 2.0 * a3 * R * R + 3.0 * R * R;
    const double j22 = a2 + a3 * R * R;
    const double lip_b = std::sqrt(1.0 + j21 * j21 + j22 * j22);
    const double lip_sigma = 2.0 * std::sqrt(e1) * R;
    return 2.0 * lip_b + lip_sigma * lip_sigma;
  });
  return s;
}

ModelSpec make_sir(const Params& p) {
  const double al = param(p, "alpha");
  const double be = param(p, "beta");
  const double ga = param(p, "gamma");
  const double ka = param(p, "kappa");
  require(al > 0.0 && be > 0.0 && ga > 0.0 && ka > 0.0,
          "sir: alpha, beta, gamma, kappa must be positive");
  ModelSpec s;
  s.d = 3;
  s.m = 1;
  s.domain = Domain::kNonnegativeOrthant;
  s.drift = [al, ga, ka](double, const Vector& x, Vector& out) {
    out.resize(3);
    const double inf = al * x(0) * x(1);
    out(0) = -inf - ka * x(0) + ka;
    out(1) = inf - (ga + ka) * x(1);
    out(2) = ga * x(1) - ka * x(2);
  };
  s.diffusion = [be](double, const Vector& x, Matrix& out) {
    out.resize(3, 1);
    const double v = be * x(0) * x(1);
    out(0, 0) = -v;
    out(1, 0) = v;
    out(2, 0) = 0.0;
  };

  LyapunovBundle v;
  v.value = [](const Vector& x) {
    const double u = x(0) + x(1) - 1.0;
    return u * u;
  };
  v.gradient = [](const Vector& x) -> Vector {
    const double u = 2.0 * (x(0) + x(1) - 1.0);
    Vector g(3);
    g << u, u, 0.0;
    return g;
  };
  v.hessian = [](const Vector&) -> Matrix {
    Matrix h = Matrix::Zero(3, 3);
    h.topLeftCorner(2, 2).setConstant(2.0);
    return h;
  };
  v.delta = param(p, "delta");
  v.eta = param(p, "eta");
  v.f_weight = constant_weight(0.5 * ga);
  v.gamma = Modulus::Linear(1.0);
  s.lyapunov = v;

  s.monotonicity = lipschitz_monotonicity(param(p, "eps0"), [=](double R) {
    const double lip_b = std::sqrt((al * R + ka) * (al * R + ka) +
                                   2.0 * (al * R) * (al * R) +
                                   (al * R + ga + ka) * (al * R + ga + ka) +
                                   ga * ga + ka * ka);
    return 2.0 * lip_b + 2.0 * be * be * R * R;
  });
  return s;
}

ModelSpec make_lv3(const Params& p) {
  const double r = param(p, "r");
  const double sig = param(p, "sigma");
  require(r > 0.0, "lv3: r must be positive");
  require(sig >= 0.0, "lv3: sigma must be >= 0");
  Eigen::Matrix3d a;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const std::string key = "a" + std::to_string(i + 1) + std::to_string(j + 1);
      a(i, j) = param(p, key);
      require(a(i, j) > 0.0, "lv3: " + key + " must be positive");
    }
  }
  ModelSpec s;
  s.d = 3;
  s.m = 1;
  s.domain = Domain::kNonnegativeOrthant;
  // Stratonovich noise sigma o y_i dB rewritten in Ito form: +sigma^2/2 y_i.
  const double growth = r + 0.5 * sig * sig;
  s.drift = [a, growth](double, const Vector& y, Vector& out) {
    out.resize(3);
    for (int i = 0; i < 3; ++i) {
      out(i) = y(i) * (growth - a(i, 0) * y(0) - a(i, 1) * y(1) - a(i, 2) * y(2));
    }
  };
  s.diffusion = [sig](double, const Vector& y, Matrix& out) {
    out.resize(3, 1);
    out.col(0) = sig * y;
  };
  const double delta = param(p, "delta");
  const double eta = param(p, "eta");
  // With V = |y|^2 the competition terms are <= 0 on the orthant and every
  // remaining term is c |y|^2, c = 2r + (1 + delta) sigma^2 + 4 sigma^2 / eta.
  const double f = 2.0 * r + (1.0 + delta) * sig * sig + 4.0 * sig * sig / eta;
  s.lyapunov = squared_norm_bundle(3, delta, eta, f);

  s.monotonicity = lipschitz_monotonicity(param(p, "eps0"), [=](double R) {
    double fro = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double row = a.row(i).sum() * R;
      for (int j = 0; j < 3; ++j) {
        const double e = (i == j ? growth + row : 0.0) + a(i, j) * R;
        fro += e * e;
      }
    }
    return 2.0 * std::sqrt(fro) + sig * sig;
  });
  return s;
}

ModelSpec make_brownian(const Params& p) {
  ModelSpec s;
  s.d = 1;
  s.m = 1;
  s.drift = [](double, const Vector&, Vector& out) { out = Vector::Zero(1); };
  s.diffusion = [](double, const Vector&, Matrix& out) {
    out = Matrix::Ones(1, 1);
  };
  const double delta = param(p, "delta");
  const double eta = param(p, "eta");
  s.lyapunov = squared_norm_bundle(1, delta, eta, delta + 4.0 / eta);
  s.monotonicity = lipschitz_monotonicity(param(p, "eps0"), [](double) { return 1.0; });
  return s;
}

ModelSpec make_ou(const Params& p) {
  const double a = param(p, "a");
  require(a > 0.0, "ou: a must be positive");
  ModelSpec s;
  s.d = 1;
  s.m = 1;
  s.drift = [a](double, const Vector& x, Vector& out) { out = -a * x; };
  s.diffusion = [](double, const Vector&, Matrix& out) {
    out = Matrix::Ones(1, 1);
  };
  const double delta = param(p, "delta");
  const double eta = param(p, "eta");
  s.lyapunov = squared_norm_bundle(1, delta, eta, delta + 4.0 / eta);
  s.monotonicity = lipschitz_monotonicity(param(p, "eps0"), [](double) { return 1.0; });
  return s;
}

struct Entry {
  const char* name;
  Params defaults;
  ModelSpec (*make)(const Params&);
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e;
    auto with = [](Params base, const Params& extra) {
      base.insert(extra.begin(), extra.end());
      return base;
    };
    e.push_back({"holder13", with(common_defaults(1.0, 4.0), {{"x0_1", 1.0}}),
                 make_holder13});
    e.push_back({"power_drift",
                 with(common_defaults(1.0, 1.0),
                      {{"alpha", 0.5}, {"sigma", 0.0}, {"dim", 2.0},
                       {"x0_1", 1.0}, {"x0_2", 0.0}}),
                 make_power_drift});
    e.push_back({"duffing_vdp",
                 with(common_defaults(1.0, 1.0),
                      {{"alpha1", 1.0}, {"alpha2", 1.0}, {"alpha3", 1.0},
                       {"eta0", 1.0}, {"eta1", 1.0}, {"x0_1", 1.0}, {"x0_2", 0.0}}),
                 make_duffing});
    e.push_back({"sir",
                 with(common_defaults(1.0, 1.0),
                      {{"alpha", 1.0}, {"beta", 1.0}, {"gamma", 1.0}, {"kappa", 1.0},
                       {"x0_1", 0.9}, {"x0_2", 0.1}, {"x0_3", 0.0}}),
                 make_sir});
    Params lv = with(common_defaults(1.0, 1.0),
                     {{"r", 1.0}, {"sigma", 1.0},
                      {"x0_1", 0.5}, {"x0_2", 0.5}, {"x0_3", 0.5}});
    for (int i = 1; i <= 3; ++i) {
      for (int j = 1; j <= 3; ++j) {
        lv["a" + std::to_string(i) + std::to_string(j)] = (i == j) ? 1.0 : 0.1;
      }
    }
    e.push_back({"lv3", lv, make_lv3});
    e.push_back({"brownian", with(common_defaults(1.0, 1.0), {{"x0_1", 0.0}}),
                 make_brownian});
    e.push_back({"ou", with(common_defaults(1.0, 1.0), {{"a", 1.0}, {"x0_1", 0.0}}),
                 make_ou});
    return e;
  }();
  return entries;
}

const Entry& find_entry(std::string_view name) {
  for (const auto& e : registry()) {
    if (name == e.name) return e;
  }
  throw ConfigError("unknown model '" + std::string(name) + "'");
}

bool is_x0_key(const std::string& key) {
  if (key.rfind("x0_", 0) != 0 || key.size() == 3) return false;
  return std::all_of(key.begin() + 3, key.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

Vector ModelSpec::drift_at(double t, const Vector& x) const {
  Vector out(d);
  drift(t, x, out);
  return out;
}

Matrix ModelSpec::diffusion_at(double t, const Vector& x) const {
  Matrix out(d, m);
  diffusion(t, x, out);
  return out;
}

void ModelSpec::project(Vector& x) const {
  if (domain == Domain::kNonnegativeOrthant) x = x.cwiseMax(0.0);
}

bool ModelSpec::in_domain(const Vector& x) const {
  if (domain == Domain::kNonnegativeOrthant) return (x.array() >= 0.0).all();
  return true;
}

void ModelSpec::validate() const {
  require(d >= 1 && m >= 1, name + ": dimensions must be positive");
  require(T > 0.0, name + ": horizon T must be positive");
  require(x0.size() == d, name + ": x0 has wrong length");
  require(x0.allFinite(), name + ": x0 must be finite");
  require(in_domain(x0), name + ": x0 lies outside the model domain");
  require(static_cast<bool>(drift) && static_cast<bool>(diffusion),
          name + ": drift and diffusion must be set");
}

const std::vector<std::string>& registered_models() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : registry()) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

std::map<std::string, double> default_parameters(std::string_view name) {
  return find_entry(name).defaults;
}

ModelSpec build_model(std::string_view name,
                      const std::map<std::string, double>& overrides) {
  const Entry& entry = find_entry(name);
  Params p = entry.defaults;
  for (const auto& [key, value] : overrides) {
    if (!p.count(key) && !is_x0_key(key)) {
      throw ConfigError(std::string(name) + ": unknown parameter '" + key + "'");
    }
    require(std::isfinite(value), std::string(name) + ": parameter '" + key +
                                      "' must be finite");
    p[key] = value;
  }
  check_common(p);
  ModelSpec s = entry.make(p);
  s.name = entry.name;
  s.T = p.at("T");
  for (const auto& [key, value] : overrides) {
    if (is_x0_key(key) && std::stoi(key.substr(3)) > s.d) {
      throw ConfigError(s.name + ": '" + key + "' exceeds the state dimension");
    }
  }
  s.x0 = read_x0(p, s.d);
  s.params = p;
  s.validate();
  return s;
}

LyapunovTerms lyapunov_terms(const ModelSpec& model, double t, const Vector& x) {
  if (!model.lyapunov) {
    throw ConfigError(model.name + ": model has no Lyapunov bundle");
  }
  const LyapunovBundle& lb = *model.lyapunov;
  const Vector b = model.drift_at(t, x);
  const Matrix sig = model.diffusion_at(t, x);
  const Vector grad = lb.gradient(x);
  const Matrix hess = lb.hessian(x);

  LyapunovTerms terms;
  terms.v = lb.value(x);
  terms.drift_term = b.dot(grad);
  terms.trace = (hess * sig * sig.transpose()).trace();
  terms.pairing_sq = (sig.transpose() * grad).squaredNorm();
  if (terms.pairing_sq > 0.0) {
    if (terms.v == 0.0) {
      throw SingularQuotientError(model.name +
                                  ": V(x) = 0 with nonzero diffusion pairing");
    }
    terms.quotient = terms.pairing_sq / (lb.eta * terms.v);
  }
  terms.lhs = terms.drift_term + 0.5 * lb.delta * terms.trace + terms.quotient;
  return terms;
}

double eval_lyapunov_expression(const ModelSpec& model, double t, const Vector& x) {
  return lyapunov_terms(model, t, x).lhs;
}

}  // namespace ldp
