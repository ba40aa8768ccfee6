#include "ldp/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ldp/action.hpp"
#include "ldp/integrate.hpp"
#include "ldp/mc.hpp"
#include "ldp/model.hpp"
#include "ldp/table.hpp"
#include "ldp/verify.hpp"

namespace ldp::cli {

namespace {

namespace pt = boost::property_tree;

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string cleaned = text;
  for (char& c : cleaned) {
    if (c == ',') c = ' ';
  }
  std::istringstream is(cleaned);
  std::string tok;
  while (is >> tok) {
    try {
      out.push_back(parse_double(tok));
    } catch (const Error&) {
      throw ConfigError("field '" + key + "': '" + tok + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError("field '" + key + "' is empty");
  return out;
}

double parse_scalar(const std::string& key, const std::string& text) {
  const auto v = parse_list(key, text);
  if (v.size() != 1) throw ConfigError("field '" + key + "' expects one number");
  return v.front();
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_scalar(key, text);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
    throw ConfigError("field '" + key + "' expects a nonnegative integer");
  }
  return static_cast<std::uint64_t>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("field '" + key + "' expects true or false");
}

// Typed access to the command section with defaults and key validation.
class Section {
 public:
  Section(std::string name, const std::map<std::string, std::string>& values)
      : name_(std::move(name)), values_(values) {}

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  const std::string& raw(const std::string& key) const {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required field '" + name_ + "." + key + "'");
    return it->second;
  }
  double number(const std::string& key) const { return parse_scalar(qualified(key), raw(key)); }
  double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : (used_.insert(key), fallback);
  }
  std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? parse_count(qualified(key), raw(key)) : (used_.insert(key), fallback);
  }
  std::vector<double> list(const std::string& key) const { return parse_list(qualified(key), raw(key)); }
  std::vector<double> list(const std::string& key, std::vector<double> fallback) const {
    return has(key) ? list(key) : (used_.insert(key), std::move(fallback));
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? raw(key) : (used_.insert(key), fallback);
  }
  bool flag(const std::string& key, bool fallback) const {
    return has(key) ? parse_bool(qualified(key), raw(key)) : (used_.insert(key), fallback);
  }

  void reject_unused() const {
    for (const auto& [key, value] : values_) {
      if (!used_.count(key)) throw ConfigError("unknown field '" + name_ + "." + key + "'");
    }
  }

 private:
  std::string qualified(const std::string& key) const { return name_ + "." + key; }

  std::string name_;
  const std::map<std::string, std::string>& values_;
  mutable std::set<std::string> used_;
};

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vector sized(const std::string& key, const std::vector<double>& v, int n) {
  if (static_cast<int>(v.size()) != n) {
    throw ConfigError("field '" + key + "' needs " + std::to_string(n) + " values");
  }
  return to_vector(v);
}

ModelSpec configured_model(const RunConfig& cfg) {
  ModelSpec model = build_model(cfg.model_name, cfg.overrides);
  if (cfg.horizon) model.T = *cfg.horizon;
  if (cfg.x0) model.x0 = sized("model.x0", *cfg.x0, model.d);
  model.validate();
  return model;
}

struct Artifact {
  std::string suffix;
  Table table;
};

struct Outcome {
  std::vector<Artifact> artifacts;
  std::string summary;
  ExitCode code = ExitCode::kOk;
};

Table path_table(const Path& p) {
  std::ostringstream os;
  write_path_csv(os, p);
  std::istringstream is(os.str());
  return read_csv(is);
}

Table control_table(const Control& c) {
  std::ostringstream os;
  write_control_csv(os, c);
  std::istringstream is(os.str());
  return read_csv(is);
}

Control section_control(const Section& sec, const ModelSpec& model, const TimeGrid& grid,
                        const std::string& key, double fill) {
  if (sec.has(key + "_file")) {
    std::ifstream in(sec.raw(key + "_file"));
    if (!in) throw ConfigError("cannot open control file '" + sec.raw(key + "_file") + "'");
    Control c = read_control_csv(in, grid.horizon());
    if (!(c.grid == grid) || c.values.cols() != model.m) {
      throw ConfigError("control file does not match the grid or noise dimension");
    }
    return c;
  }
  const auto h = sec.list(key, std::vector<double>(model.m, fill));
  return Control::Constant(grid, sized(key, h, model.m));
}

Outcome run_simulate(const RunConfig& cfg, const Section& sec, const ModelSpec& model,
                     const TimeGrid& grid) {
  const double eps = sec.number("epsilon");
  const auto sample = sec.count("sample", 0);
  sec.reject_unused();
  const Path p = simulate_sde(model, eps, grid, NoiseStream{cfg.seed, sample});
  Outcome o;
  o.artifacts.push_back({"simulate", path_table(p)});
  std::ostringstream s;
  s << "simulate " << model.name << ": eps=" << format_double(eps) << " K=" << grid.steps()
    << " endpoint=(" << p.endpoint().transpose() << ")";
  o.summary = s.str();
  return o;
}

Outcome run_skeleton(const RunConfig&, const Section& sec, const ModelSpec& model,
                     const TimeGrid& grid) {
  const Control h = section_control(sec, model, grid, "control", 0.0);
  sec.reject_unused();
  const Path p = solve_skeleton(model, h, grid);
  Outcome o;
  o.artifacts.push_back({"skeleton", path_table(p)});
  std::ostringstream s;
  s << "skeleton " << model.name << ": action=" << format_double(action_functional(h))
    << " endpoint=(" << p.endpoint().transpose() << ")";
  o.summary = s.str();
  return o;
}

TargetSpec section_target(const Section& sec, const ModelSpec& model, double tolerance) {
  if (sec.has("target")) return TargetSpec::Point(sized("rate.target", sec.list("target"), model.d), tolerance);
  if (sec.has("halfspace_a")) {
    return TargetSpec::HalfSpace(sized("rate.halfspace_a", sec.list("halfspace_a"), model.d),
                                 sec.number("halfspace_c"), tolerance);
  }
  throw ConfigError("missing required field 'rate.target' (or 'rate.halfspace_a')");
}

OptimizerOptions section_optimizer(const Section& sec) {
  OptimizerOptions opts;
  opts.gtol = sec.number("gtol", opts.gtol);
  opts.max_iterations = sec.count("max_iterations", opts.max_iterations);
  opts.mu_max = sec.number("mu_max", opts.mu_max);
  return opts;
}

Outcome run_rate(const RunConfig&, const Section& sec, const ModelSpec& model,
                 const TimeGrid& grid) {
  const TargetSpec target = section_target(sec, model, sec.number("tolerance", 1e-6));
  const OptimizerOptions opts = section_optimizer(sec);
  const bool refine = sec.flag("refine", false);
  sec.reject_unused();

  std::vector<std::pair<std::size_t, RateResult>> results;
  if (refine) {
    RefinementStudy study = rate_with_refinement(model, target, grid, opts);
    results.emplace_back(grid.steps(), std::move(study.coarse));
    results.emplace_back(2 * grid.steps(), std::move(study.fine));
  } else {
    results.emplace_back(grid.steps(), minimize_endpoint_action(model, target, grid, opts));
  }
  Table t;
  for (const auto& [K, r] : results) {
    Table one = rate_table(r);
    if (t.header.empty()) {
      t.header = one.header;
      t.header.insert(t.header.begin(), "K");
    }
    one.rows[0].insert(one.rows[0].begin(), std::to_string(K));
    t.add_row(one.rows[0]);
  }
  Outcome o;
  o.artifacts.push_back({"rate", t});
  o.artifacts.push_back({"rate_control", control_table(results.front().second.control)});
  const RateResult& r = results.front().second;
  std::ostringstream s;
  s << "rate " << model.name << ": action=" << format_double(r.action)
    << " terminal_error=" << format_double(r.terminal_error) << " verdict=" << to_string(r.verdict);
  if (refine) s << " refinement_delta=" << format_double(results[1].second.action - r.action);
  o.summary = s.str();
  return o;
}

Outcome run_verify(const RunConfig& cfg, const Section& sec, const ModelSpec& model,
                   const CliOptions& cli) {
  const double R = sec.number("R", 5.0);
  const double tol = sec.number("tol", 1e-9);
  const auto n_pairs = sec.count("n_pairs", 10000);
  const double radius = sec.number("radius", 10.0);
  const auto n_points = sec.count("n_points", 10000);
  const auto n_t = sec.count("n_t", 101);
  const auto n_x = sec.count("n_x", 256);
  const auto n_c = sec.count("ratio_n_c", 11);
  const auto n_s = sec.count("ratio_n_s", 2001);
  const double gamma_cap = sec.number("gamma_cap", 1e6);
  sec.reject_unused();

  std::vector<AuditReport> reports;
  AuditReport integ;
  integ.assumption = AssumptionTag::kIntegrability;
  integ.samples = n_t * (n_x + 1);
  integ.statistic = audit_integrability(model, R, n_t, n_x, cfg.seed);
  integ.worst_margin = integ.statistic;
  integ.tolerance = std::numeric_limits<double>::infinity();
  integ.passed = std::isfinite(integ.statistic);
  reports.push_back(integ);
  if (model.monotonicity) {
    reports.push_back(audit_monotonicity(model, R, n_pairs, cfg.seed, tol, cli.threads));
    const double eps0 = model.monotonicity->eps0;
    reports.push_back(audit_ratio(model.monotonicity->eta_for_radius(R), eps0, n_c, n_s,
                                  AssumptionTag::kRatioEta));
  }
  if (model.lyapunov) {
    auto [growth, trace] = audit_lyapunov(model, radius, n_points, cfg.seed, tol, cli.threads);
    reports.push_back(growth);
    reports.push_back(trace);
    reports.push_back(audit_ratio(model.lyapunov->gamma, gamma_cap, n_c, n_s,
                                  AssumptionTag::kRatioGamma));
  }
  Outcome o;
  o.artifacts.push_back({"verify", audit_table(reports)});
  std::size_t failed = 0;
  for (const auto& r : reports) failed += r.passed ? 0 : 1;
  std::ostringstream s;
  s << audit_summary(reports) << "verify " << model.name << ": " << reports.size() - failed
    << "/" << reports.size() << " audits passed";
  o.summary = s.str();
  if (failed) o.code = ExitCode::kAuditFailed;
  return o;
}

Outcome run_mc_ldp(const RunConfig& cfg, const Section& sec, const ModelSpec& model,
                   const TimeGrid& grid, const CliOptions& cli) {
  const auto eps = sec.list("eps");
  const auto n = sec.count("n", 10000);
  const std::string kind = sec.text("event", "halfspace");
  EventSpec event;
  std::optional<TargetSpec> target;
  if (kind == "halfspace") {
    const Vector a = sized("mc-ldp.event_a", sec.list("event_a"), model.d);
    const double c = sec.number("event_c");
    event = EventSpec::EndpointHalfSpace(a, c);
    target = TargetSpec::HalfSpace(a, c, 1e-6);
  } else if (kind == "exit_ball") {
    event = EventSpec::ExitBall(sec.number("event_radius"));
  } else {
    throw ConfigError("field 'mc-ldp.event' must be halfspace or exit_ball");
  }
  double rate_value = 0.0;
  if (sec.has("rate_value")) {
    rate_value = sec.number("rate_value");
  } else if (target) {
    rate_value = minimize_endpoint_action(model, *target, grid).rate();
  } else {
    throw ConfigError("missing required field 'mc-ldp.rate_value' for exit_ball events");
  }
  sec.reject_unused();
  const auto rows = ldp_scaling_report(model, event, eps, n, grid, cfg.seed, rate_value, cli.threads);
  Outcome o;
  o.artifacts.push_back({"mc-ldp", ldp_table(rows)});
  std::ostringstream s;
  s << "mc-ldp " << model.name << ": rate=" << format_double(rate_value) << " rows=" << rows.size();
  for (const auto& r : rows) {
    if (!r.estimate.valid()) o.code = ExitCode::kNumerical;
  }
  o.summary = s.str();
  return o;
}

Outcome run_converge_ii(const RunConfig& cfg, const Section& sec, const ModelSpec& model,
                        const TimeGrid& grid, const CliOptions& cli) {
  const auto eps = sec.list("eps", {0.1, 0.01, 0.001});
  const double delta = sec.number("delta", 0.25);
  const auto n = sec.count("n", 10000);
  const Control h = section_control(sec, model, grid, "control", 1.0);
  ConvergenceOptions opts;
  opts.exit_radius = sec.number("exit_radius", 10.0);
  if (sec.has("passage_level")) opts.passage_level = sec.number("passage_level");
  opts.threads = cli.threads;
  sec.reject_unused();
  const auto rows = convergence_statement_ii(model, h, eps, delta, n, grid, cfg.seed, opts);
  Outcome o;
  o.artifacts.push_back({"converge-ii", convergence_table(rows)});
  std::ostringstream s;
  s << "converge-ii " << model.name << ": fractions";
  for (const auto& r : rows) {
    s << ' ' << format_double(r.fraction_exceeding);
    if (r.blowups) o.code = ExitCode::kNumerical;
  }
  o.summary = s.str();
  return o;
}

Outcome run_converge_i(const RunConfig&, const Section& sec, const ModelSpec& model,
                       const TimeGrid& grid) {
  const auto freqs = sec.list("frequencies", {1, 2, 4, 8, 16});
  std::vector<double> e1(model.m, 0.0);
  e1[0] = 1.0;
  const Vector dir = sized("converge-i.direction", sec.list("direction", e1), model.m);
  const Control limit = section_control(sec, model, grid, "limit", 0.0);
  sec.reject_unused();
  std::vector<std::pair<int, Control>> family;
  for (double f : freqs) {
    if (f != std::floor(f) || f < 1) throw ConfigError("field 'converge-i.frequencies' expects positive integers");
    family.emplace_back(static_cast<int>(f), sinusoid_control(grid, static_cast<int>(f), dir));
  }
  const auto rows = weak_convergence_statement_i(model, family, limit, grid);
  Outcome o;
  o.artifacts.push_back({"converge-i", weak_convergence_table(rows)});
  std::ostringstream s;
  s << "converge-i " << model.name << ": distances";
  for (const auto& [n, dist] : rows) s << ' ' << format_double(dist);
  o.summary = s.str();
  return o;
}

std::string artifact_path(const RunConfig& cfg, const std::string& suffix, const char* ext) {
  return cfg.output_prefix + "_" + suffix + ext;
}

void write_file(const std::string& path, const std::string& contents) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << contents;
  if (!out) throw Error("cannot write '" + path + "'");
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {
      "simulate", "skeleton", "rate", "verify", "mc-ldp", "converge-i", "converge-ii"};
  return names;
}

RunConfig parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
    auto sec = tree.get_child_optional(section);
    if (!sec) return std::nullopt;
    auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return *v;
  };
  auto need = [&](const std::string& section, const std::string& key) {
    auto v = get(section, key);
    if (!v || v->empty()) throw ConfigError("missing required field '" + section + "." + key + "'");
    return *v;
  };

  RunConfig cfg;
  cfg.command = need("run", "command");
  if (std::find(commands().begin(), commands().end(), cfg.command) == commands().end()) {
    throw ConfigError("unknown command '" + cfg.command + "'");
  }
  cfg.output_prefix = need("run", "output");
  if (auto s = get("run", "seed")) cfg.seed = parse_count("run.seed", *s);
  for (const auto& [key, node] : tree.get_child("run")) {
    if (key != "command" && key != "output" && key != "seed") {
      throw ConfigError("unknown field 'run." + key + "'");
    }
  }

  cfg.model_name = need("model", "name");
  for (const auto& [key, node] : tree.get_child("model")) {
    const std::string value = node.get_value<std::string>();
    if (key == "name") continue;
    if (key == "x0") {
      cfg.x0 = parse_list("model.x0", value);
    } else if (key == "T") {
      cfg.horizon = parse_scalar("model.T", value);
    } else {
      cfg.overrides[key] = parse_scalar("model." + key, value);
    }
  }
  if (tree.get_child_optional("grid")) {
    for (const auto& [key, node] : tree.get_child("grid")) {
      const std::string value = node.get_value<std::string>();
      if (key == "K") {
        cfg.steps = parse_count("grid.K", value);
        if (cfg.steps == 0) throw ConfigError("field 'grid.K' must be positive");
      } else if (key == "T") {
        cfg.horizon = parse_scalar("grid.T", value);
      } else {
        throw ConfigError("unknown field 'grid." + key + "'");
      }
    }
  }
  if (auto sec = tree.get_child_optional(cfg.command)) {
    for (const auto& [key, node] : *sec) cfg.section[key] = node.get_value<std::string>();
  }
  for (const auto& [name, node] : tree) {
    if (name != "run" && name != "model" && name != "grid" && name != cfg.command) {
      throw ConfigError("unexpected section '[" + name + "]' for command '" + cfg.command + "'");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in);
}

ExitCode run(const RunConfig& config, const CliOptions& options, std::ostream& out,
             std::ostream& err) {
  RunConfig cfg = config;
  if (options.seed) cfg.seed = *options.seed;
  try {
    const ModelSpec model = configured_model(cfg);
    const TimeGrid grid(model.T, cfg.steps);
    const Section sec(cfg.command, cfg.section);

    Outcome o;
    if (cfg.command == "simulate") o = run_simulate(cfg, sec, model, grid);
    else if (cfg.command == "skeleton") o = run_skeleton(cfg, sec, model, grid);
    else if (cfg.command == "rate") o = run_rate(cfg, sec, model, grid);
    else if (cfg.command == "verify") o = run_verify(cfg, sec, model, options);
    else if (cfg.command == "mc-ldp") o = run_mc_ldp(cfg, sec, model, grid, options);
    else if (cfg.command == "converge-i") o = run_converge_i(cfg, sec, model, grid);
    else if (cfg.command == "converge-ii") o = run_converge_ii(cfg, sec, model, grid, options);
    else throw ConfigError("unknown command '" + cfg.command + "'");

    if (!options.force) {
      for (const auto& a : o.artifacts) {
        for (const char* ext : {".csv", ".json"}) {
          if (ext == std::string(".json") && !options.json) continue;
          const std::string path = artifact_path(cfg, a.suffix, ext);
          if (std::filesystem::exists(path)) {
            throw ConfigError("output '" + path + "' exists; pass --force to overwrite");
          }
        }
      }
    }
    for (const auto& a : o.artifacts) {
      std::ostringstream csv;
      write_csv(csv, a.table);
      write_file(artifact_path(cfg, a.suffix, ".csv"), csv.str());
      if (options.json) write_file(artifact_path(cfg, a.suffix, ".json"), to_json(a.table));
    }
    out << o.summary << '\n';
    return o.code;
  } catch (const BlowUpError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::kNumerical;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::kInvalid;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::kInvalid;
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Small-noise SDE toolkit: simulation, assumption audits, minimum-action rates, "
               "and Monte Carlo large-deviation checks"};
  std::string config_path;
  CliOptions options;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "Run configuration (INI)")->required();
  app.add_flag("--force", options.force, "Overwrite existing outputs");
  app.add_flag("--json", options.json, "Also emit JSON records");
  app.add_option("--threads", options.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 1024u));
  auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kInvalid);
  }
  if (seed_opt->count() > 0) options.seed = seed;
  try {
    const RunConfig cfg = load_config(config_path);
    return static_cast<int>(run(cfg, options, std::cout, std::cerr));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kInvalid);
  }
}

}  // namespace ldp::cli
