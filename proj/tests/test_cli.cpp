#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "ldp/cli.hpp"
#include "ldp/table.hpp"
#include "ldp/types.hpp"

namespace fs = std::filesystem;
using ldp::cli::ExitCode;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("ldp_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ldp::cli::RunConfig parse(const std::string& text) {
  std::istringstream is(text);
  return ldp::cli::parse_config(is);
}

ExitCode run(const std::string& text, ldp::cli::CliOptions opts, std::string* out = nullptr,
             std::string* err = nullptr) {
  std::ostringstream o, e;
  const ExitCode code = ldp::cli::run(parse(text), opts, o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

std::string config(const Scratch& s, const std::string& command, const std::string& model,
                   const std::string& extra) {
  return "[run]\ncommand = " + command + "\noutput = " + (s.dir / "out").string() +
         "\nseed = 3\n[model]\nname = " + model + "\n" + extra;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("parse errors name the field or line") {
  try {
    parse("[run]\ncommand = verify\noutput = x\n[model]\nT = 1\n");
    FAIL("expected error");
  } catch (const ldp::ConfigError& e) {
    CHECK(std::string(e.what()).find("model.name") != std::string::npos);
  }
  try {
    parse("[run]\ncommand = verify\nthis line is broken\n");
    FAIL("expected error");
  } catch (const ldp::ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("[run]\ncommand = fly\noutput = x\n[model]\nname = ou\n"), ldp::ConfigError);
  CHECK_THROWS_AS(parse("[run]\ncommand = rate\noutput = x\n[model]\nname = ou\n[verify]\nR = 1\n"),
                  ldp::ConfigError);
  CHECK_THROWS_AS(parse("[run]\ncommand = rate\noutput = x\n[model]\nname = ou\n[grid]\nK = 0\n"),
                  ldp::ConfigError);
}

TEST_CASE("parsed fields") {
  const auto c = parse(
      "[run]\ncommand = rate\noutput = a/b\nseed = 9\n[model]\nname = ou\na = 2\nx0 = 0.5\n"
      "[grid]\nK = 64\nT = 2\n[rate]\ntarget = 1\n");
  CHECK(c.command == "rate");
  CHECK(c.seed == 9);
  CHECK(c.overrides.at("a") == 2.0);
  CHECK((*c.x0)[0] == 0.5);
  CHECK(*c.horizon == 2.0);
  CHECK(c.steps == 64);
  CHECK(c.section.at("target") == "1");
}

TEST_CASE("verify on holder13 with defaults passes") {
  Scratch s;
  std::string out;
  CHECK(run(config(s, "verify", "holder13", ""), {}, &out) == ExitCode::kOk);
  CHECK(out.find("verify holder13") != std::string::npos);
  std::ifstream in(s.dir / "out_verify.csv");
  const auto t = ldp::read_csv(in);
  REQUIRE(t.rows.size() >= 4);
  for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(t.cell(i, "passed") == "true");
}

TEST_CASE("failed audit exits with 2") {
  Scratch s;
  CHECK(run(config(s, "verify", "holder13", "eta = 0.5\n"), {}) == ExitCode::kAuditFailed);
}

TEST_CASE("rate on brownian") {
  Scratch s;
  ldp::cli::CliOptions opts;
  opts.json = true;
  CHECK(run(config(s, "rate", "brownian", "[grid]\nK = 128\n[rate]\ntarget = 1\n"), opts) ==
        ExitCode::kOk);
  std::ifstream in(s.dir / "out_rate.csv");
  const auto t = ldp::read_csv(in);
  CHECK(t.number(0, "action") == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(fs::exists(s.dir / "out_rate_control.csv"));
  CHECK(slurp(s.dir / "out_rate.json").find("\"action\"") != std::string::npos);
}

TEST_CASE("unknown model, unknown key, missing command field") {
  Scratch s;
  std::string err;
  CHECK(run(config(s, "rate", "nosuch", "[rate]\ntarget = 1\n"), {}, nullptr, &err) == ExitCode::kInvalid);
  CHECK(err.find("nosuch") != std::string::npos);
  CHECK(run(config(s, "rate", "ou", "[rate]\ntarget = 1\nbogus = 2\n"), {}, nullptr, &err) ==
        ExitCode::kInvalid);
  CHECK(err.find("rate.bogus") != std::string::npos);
  CHECK(run(config(s, "simulate", "ou", ""), {}, nullptr, &err) == ExitCode::kInvalid);
  CHECK(err.find("simulate.epsilon") != std::string::npos);
}

TEST_CASE("outputs are protected and reproducible") {
  Scratch s;
  const std::string cfg = config(s, "simulate", "duffing_vdp", "[grid]\nK = 50\n[simulate]\nepsilon = 0.1\n");
  REQUIRE(run(cfg, {}) == ExitCode::kOk);
  const std::string first = slurp(s.dir / "out_simulate.csv");
  std::string err;
  CHECK(run(cfg, {}, nullptr, &err) == ExitCode::kInvalid);
  CHECK(err.find("--force") != std::string::npos);
  ldp::cli::CliOptions force;
  force.force = true;
  REQUIRE(run(cfg, force) == ExitCode::kOk);
  CHECK(slurp(s.dir / "out_simulate.csv") == first);
  force.seed = 4;
  REQUIRE(run(cfg, force) == ExitCode::kOk);
  CHECK(slurp(s.dir / "out_simulate.csv") != first);
}

TEST_CASE("emitted CSV round-trips") {
  Scratch s;
  REQUIRE(run(config(s, "converge-i", "brownian", "[grid]\nK = 200\n"), {}) == ExitCode::kOk);
  const std::string text = slurp(s.dir / "out_converge-i.csv");
  std::istringstream in(text);
  const auto t = ldp::read_csv(in);
  std::ostringstream back;
  ldp::write_csv(back, t);
  CHECK(back.str() == text);
  CHECK(t.rows.size() == 5);
}

TEST_CASE("remaining commands run") {
  Scratch s;
  ldp::cli::CliOptions opts;
  opts.threads = 2;
  CHECK(run(config(s, "skeleton", "sir", "[grid]\nK = 100\n[skeleton]\ncontrol = 0.5\n"), opts) ==
        ExitCode::kOk);
  CHECK(run(config(s, "mc-ldp", "brownian",
                   "[grid]\nK = 4\n[mc-ldp]\neps = 0.5, 0.25\nn = 2000\nevent_a = 1\nevent_c = 1\n"),
            opts) == ExitCode::kOk);
  std::ifstream in(s.dir / "out_mc-ldp.csv");
  CHECK(ldp::read_csv(in).rows.size() == 2);
  CHECK(run(config(s, "converge-ii", "ou", "[grid]\nK = 50\n[converge-ii]\nn = 500\n"), opts) ==
        ExitCode::kOk);
  CHECK(run(config(s, "mc-ldp", "ou", "[mc-ldp]\neps = 0.5\nevent = exit_ball\nevent_radius = 2\n"),
            opts) == ExitCode::kInvalid);
}

TEST_CASE("skeleton reads a control file") {
  Scratch s;
  s.write("h.csv", "t,h1\n0,1\n0.5,1\n");
  REQUIRE(run(config(s, "skeleton", "brownian",
                     "[grid]\nK = 2\n[skeleton]\ncontrol_file = " + (s.dir / "h.csv").string() + "\n"),
              {}) == ExitCode::kOk);
  std::ifstream in(s.dir / "out_skeleton.csv");
  CHECK(ldp::read_csv(in).number(2, "x1") == 1.0);
}

TEST_CASE("binary flags") {
  Scratch s;
  const fs::path cfg = s.write("run.ini", config(s, "simulate", "ou", "[grid]\nK = 10\n[simulate]\nepsilon = 0.5\n"));
  const std::string bin = LDP_CLI_PATH;
  auto sh = [](const std::string& cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  CHECK(sh(bin + " --config " + cfg.string() + " --threads 2 --seed 5 --json") == 0);
  CHECK(fs::exists(s.dir / "out_simulate.json"));
  CHECK(sh(bin + " --config " + cfg.string()) == 1);
  CHECK(sh(bin + " --config " + cfg.string() + " --force") == 0);
  CHECK(sh(bin + " --config " + (s.dir / "missing.ini").string()) == 1);
  CHECK(sh(bin + " --bogus") == 1);
  CHECK(sh(bin + " --help") == 0);
}

}
