#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "levylab/harness.hpp"
#include "levylab/plot.hpp"

namespace levylab {

/// Parsed command line: exactly one subcommand, with inline overrides
/// taking precedence over config-file values.
struct Command {
  enum class Action { run, plot };
  Action action = Action::run;
  std::optional<ExperimentKind> forced_kind;  // from a named subcommand
  std::string config_path;                    // empty = defaults only
  std::vector<std::pair<std::string, std::string>> overrides;  // --set
  std::optional<std::string> out;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::string plot_input;
  std::optional<PlotKind> plot_kind;
};

/// Thrown on unknown flags/subcommands or missing required arguments; the
/// CLI entry point turns it into a usage message and nonzero exit.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Signals that --help was printed; exit with success.
struct HelpRequested {
  std::string text;
};

Command parse_args(const std::vector<std::string>& args);

/// Resolves the final config for a run command: file values, then the
/// subcommand's kind, then --set pairs, then dedicated flags.
ExperimentConfig resolve_config(const Command& cmd);

/// Full command execution; returns the process exit code.
int run_command(const Command& cmd, std::ostream& out, std::ostream& err);

/// argv-level entry point used by the binary.
int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

}  // namespace levylab
