#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ldp::cli {

enum class ExitCode : int {
  kOk = 0,
  kInvalid = 1,       // bad flags, config, or filesystem failure
  kAuditFailed = 2,
  kNumerical = 3,     // solver blow-up
};

/// One run parsed from an INI-style file:
///
///   [run]     command, output, seed
///   [model]   name, x0, T, plus parameter overrides
///   [grid]    K, T
///   [<command>]  command-specific keys
struct RunConfig {
  std::string command;
  std::string output_prefix;
  std::uint64_t seed = 1;
  std::string model_name;
  std::map<std::string, double> overrides;
  std::optional<std::vector<double>> x0;
  std::optional<double> horizon;
  std::size_t steps = 1000;
  std::map<std::string, std::string> section;  // command-specific keys
};

struct CliOptions {
  bool force = false;
  bool json = false;
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;
};

const std::vector<std::string>& commands();

/// Throws ConfigError naming the line or missing field.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

/// Dispatches one run, writes `<prefix>_<command>.csv` (and `.json`), prints
/// a one-line summary to `out`, diagnostics to `err`.
ExitCode run(const RunConfig& config, const CliOptions& options, std::ostream& out,
             std::ostream& err);

/// Full command-line entry point used by the ldp_cli tool.
int main(int argc, char** argv);

}  // namespace ldp::cli
