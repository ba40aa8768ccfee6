// Acceptance criteria. Usage: acceptance [criterion ...]; no arguments runs
// all of them. Prints one PASS/FAIL line per criterion and exits nonzero if
// any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "checks.hpp"
#include "ldp/action.hpp"
#include "ldp/mc.hpp"
#include "ldp/verify.hpp"
#include "oracles.hpp"

using ldp::Control;
using ldp::TargetSpec;
using ldp::TimeGrid;
using ldp::Vector;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [violated]");
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Vector scalar(double v) { return Vector::Constant(1, v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void schilder(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto b = ldp::build_model("brownian");
  const auto r = ldp::minimize_endpoint_action(b, TargetSpec::Point(scalar(1.0), 1e-6), TimeGrid(1.0, 512));
  const double elapsed = seconds_since(t0);
  const double exact = oracle::schilder_rate(0.0, 1.0, 1.0);
  o.require(std::abs(r.action - exact) <= 1e-3, "action " + num(r.action) + " vs " + num(exact));
  o.require(r.terminal_error <= 1e-4, "terminal_error " + num(r.terminal_error));
  o.require(elapsed <= 10.0, "runtime " + num(elapsed) + " s");
}

void ou_rate(Outcome& o) {
  const auto ou = ldp::build_model("ou");
  const TimeGrid g(1.0, 16384);
  for (double z : {0.5, 1.0, 2.0}) {
    const double closed = oracle::ou_rate(1.0, 0.0, z, 1.0);
    const double searched = oracle::ou_rate_grid_search(1.0, 0.0, z, 1.0);
    o.require(std::abs(closed - searched) <= 1e-6 * closed,
              "z=" + num(z) + " oracle " + num(closed) + " (grid search " + num(searched) + ")");
    const auto r = ldp::minimize_endpoint_action(ou, TargetSpec::Point(scalar(z)), g);
    o.require(std::abs(r.action - closed) <= 1e-3, "action " + num(r.action));
  }
}

void holder_monotonicity(Outcome& o) {
  const auto m = ldp::build_model("holder13");
  const auto r = ldp::audit_monotonicity(m, 5.0, 100000, 1, 0.0);
  o.require(r.passed && r.worst_margin <= 0.0,
            "worst_margin " + num(r.worst_margin) + " over " + std::to_string(r.samples) + " pairs");
}

void duffing_lyapunov(Outcome& o) {
  struct Case {
    double a2, e0, e1;
  };
  for (const Case c : {Case{1, 1, 1}, Case{3, 0.5, 2}}) {
    const auto m = ldp::build_model("duffing_vdp", {{"alpha2", c.a2}, {"eta0", c.e0}, {"eta1", c.e1}});
    const double K = 5 * c.e0 + 10 * c.e1 + 2 * c.a2;
    o.require(m.lyapunov->f_weight(0.0) == K, "K=" + num(K));
    const auto [growth, trace] = ldp::audit_lyapunov(m, 10.0, 100000, 1, 1e-9);
    o.require(growth.passed, "growth worst_margin " + num(growth.worst_margin));
    o.require(trace.passed, "trace worst_margin " + num(trace.worst_margin));
  }
}

void sir_lyapunov(Outcome& o) {
  auto m = ldp::build_model("sir");
  const double gamma = m.params.at("gamma");
  // Compare the expression against gamma/2 itself: f = gamma/2, gamma-modulus 0.
  auto bundle = *m.lyapunov;
  bundle.f_weight = [gamma](double) { return gamma / 2; };
  bundle.gamma = ldp::Modulus::Custom("zero", [](double) { return 0.0; });
  m.lyapunov = bundle;
  const auto [growth, trace] = ldp::audit_lyapunov(m, 10.0, 100000, 1, 1e-9);
  o.require(growth.passed, "LHS - gamma/2 worst " + num(growth.worst_margin) + " over " +
                               std::to_string(growth.samples) + " points, excluded " +
                               std::to_string(growth.excluded));
  o.require(trace.passed, "trace worst " + num(trace.worst_margin));
}

void lv3_threshold(Outcome& o) {
  auto audit = [](double aii) {
    const auto m = ldp::build_model("lv3", {{"a11", aii}, {"a22", aii}, {"a33", aii}});
    return ldp::audit_lyapunov(m, 10.0, 100000, 1, 1e-9);
  };
  const auto pos = audit(1.0);
  o.require(pos.first.passed && pos.second.passed,
            "min a_ii=1.0 passes (worst " + num(pos.first.worst_margin) + ")");
  const auto neg = audit(0.4);
  o.require(!(neg.first.passed && neg.second.passed),
            "min a_ii=0.4 fails (worst " + num(neg.first.worst_margin) + ")");
}

void ldp_trend(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const double v01 = oracle::brownian_eps_log_p(0.1);
  const double v002 = oracle::brownian_eps_log_p(0.02);
  o.require(std::abs(v01 + 0.715) <= 5e-4, "eps=0.1 exact " + num(v01));
  o.require(std::abs(v002 + 0.558) <= 5e-4, "eps=0.02 exact " + num(v002));
  double prev = INFINITY;
  bool approaching = true;
  for (double eps : {0.1, 0.05, 0.02, 0.01, 0.001}) {
    const double gap = std::abs(oracle::brownian_eps_log_p(eps) + 0.5);
    approaching = approaching && gap < prev;
    prev = gap;
  }
  o.require(approaching, "exact rows approach -0.5");

  const auto b = ldp::build_model("brownian");
  const auto est = ldp::estimate_rare_event(b, ldp::EventSpec::EndpointHalfSpace(scalar(1.0), 1.0), {0.25},
                                            1000000, TimeGrid(1.0, 16), 2024);
  const double exact = oracle::normal_upper_tail(2.0);
  o.require(std::abs(est[0].p_hat - exact) <= 4 * est[0].std_err,
            "MC eps=0.25 p_hat " + num(est[0].p_hat) + " vs " + num(exact) + " (std_err " +
                num(est[0].std_err) + ")");
  const double elapsed = seconds_since(t0);
  o.require(elapsed <= 120.0, "runtime " + num(elapsed) + " s");
}

void statement_ii(Outcome& o) {
  const std::vector<double> eps = {0.1, 0.01, 0.001};
  const std::size_t n = 10000;
  for (const auto& name : ldp::registered_models()) {
    const auto m = ldp::build_model(name);
    const TimeGrid g(m.T, 256);
    const auto rows = ldp::convergence_statement_ii(m, Control::Constant(g, Vector::Ones(m.m)), eps, 0.25,
                                                    n, g, 31);
    bool nonincreasing = true;
    std::string fracs;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && rows[i].fraction_exceeding > rows[i - 1].fraction_exceeding) nonincreasing = false;
      fracs += (i ? "," : "") + num(rows[i].fraction_exceeding);
    }
    o.require(nonincreasing, name + " fractions " + fracs);
    if (name == "brownian") {
      for (const auto& r : rows) {
        const double p = oracle::brownian_abs_sup_tail_discrete(0.25 / std::sqrt(r.epsilon), g.dt());
        const double sd = std::max(std::sqrt(p * (1 - p) / n), 1.0 / n);
        o.require(std::abs(r.fraction_exceeding - p) <= 4 * sd,
                  "brownian eps=" + num(r.epsilon) + " oracle " + num(p));
      }
    }
  }
}

void statement_i(Outcome& o) {
  const auto b = ldp::build_model("brownian");
  const TimeGrid g(1.0, 1000);
  std::vector<std::pair<int, Control>> family;
  for (int n = 1; n <= 16; ++n) family.emplace_back(n, ldp::sinusoid_control(g, n, Vector::Ones(1)));
  double worst = 0.0;
  for (const auto& [n, d] : ldp::weak_convergence_statement_i(b, family, Control::Zero(g, 1), g)) {
    const double tol = 2 * g.dt() * (1 + 2 * oracle::kPi * n);
    const double err = std::abs(d - oracle::sinusoid_sup_distance(n, 1.0));
    worst = std::max(worst, err / tol);
    o.require(err <= tol, "");
  }
  o.detail.str("");
  o.detail << "worst error/tolerance " << num(worst) << " over n=1..16";
}

void hygiene(Outcome& o) {
  double worst_grad = 0.0;
  double worst_eps0 = 0.0;
  for (const auto& name : ldp::registered_models()) {
    const auto m = ldp::build_model(name);
    worst_grad = std::max(worst_grad, checks::adjoint_vs_fd(m, 20, 99).worst_relative);
    const TimeGrid g(m.T, 300);
    const Control h = ldp::sinusoid_control(g, 3, Vector::Constant(m.m, 0.5));
    worst_eps0 = std::max(worst_eps0, ldp::uniform_distance(ldp::simulate_sde(m, 0.0, g, 1),
                                                            ldp::solve_skeleton(m, Control::Zero(g, m.m), g)));
    worst_eps0 = std::max(worst_eps0, ldp::uniform_distance(ldp::simulate_controlled(m, 0.0, h, g, 1),
                                                            ldp::solve_skeleton(m, h, g)));
  }
  o.require(worst_grad <= 1e-4, "adjoint vs FD worst relative error " + num(worst_grad));
  o.require(worst_eps0 <= 1e-12, "eps=0 vs skeleton " + num(worst_eps0));

  bool identical = true;
  const auto duff = ldp::build_model("duffing_vdp");
  const TimeGrid g(1.0, 200);
  const auto ev = ldp::EventSpec::ExitBall(1.5);
  const auto h1 = ldp::count_hits(duff, ev, 0.3, g, 5, 0, 4000, 1);
  for (unsigned threads : {2u, 4u, 8u}) {
    const auto hk = ldp::count_hits(duff, ev, 0.3, g, 5, 0, 4000, threads);
    identical = identical && hk.hits == h1.hits && hk.blowups == h1.blowups;
  }
  ldp::ConvergenceOptions one, many;
  many.threads = 4;
  const Control c = Control::Constant(g, Vector::Ones(1));
  identical = identical &&
              ldp::convergence_table(ldp::convergence_statement_ii(duff, c, {0.1}, 0.25, 2000, g, 3, one)) ==
                  ldp::convergence_table(ldp::convergence_statement_ii(duff, c, {0.1}, 0.25, 2000, g, 3, many));
  const auto a1 = ldp::audit_monotonicity(duff, 3.0, 5000, 2, 1e-9, 1);
  const auto a4 = ldp::audit_monotonicity(duff, 3.0, 5000, 2, 1e-9, 4);
  identical = identical && a1.worst_margin == a4.worst_margin && a1.worst_point == a4.worst_point;
  identical = identical && ldp::simulate_sde(duff, 0.3, g, 8).states == ldp::simulate_sde(duff, 0.3, g, 8).states;
  o.require(identical, "seeded outputs identical across 1..8 threads");
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "Schilder rate", schilder},
      {2, "OU rate", ou_rate},
      {3, "holder13 monotonicity", holder_monotonicity},
      {4, "duffing_vdp Lyapunov", duffing_lyapunov},
      {5, "sir Lyapunov", sir_lyapunov},
      {6, "lv3 threshold", lv3_threshold},
      {7, "LDP scaling trend", ldp_trend},
      {8, "statement ii property", statement_ii},
      {9, "statement i property", statement_i},
      {10, "numerical hygiene", hygiene},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    Outcome o;
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    std::printf("criterion %d %s: %s | %s\n", c.id, o.pass ? "PASS" : "FAIL", c.title, o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
