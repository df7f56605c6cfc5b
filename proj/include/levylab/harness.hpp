#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "levylab/grid.hpp"

namespace levylab {

enum class ExperimentKind { validate, tau_scan, cov_decay, sup_tail };

std::string_view kind_name(ExperimentKind kind);
std::optional<ExperimentKind> kind_from_name(std::string_view name);

/// Thrown for malformed or inconsistent configuration input.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key=value experiment description. Keys not listed here are
/// rejected; missing keys fall back to the defaults below.
struct ExperimentConfig {
  std::optional<ExperimentKind> kind;
  double horizon = 1.0;
  std::int64_t steps = 4096;
  std::int64_t paths = 10000;
  std::uint64_t seed = 1;
  int depth = 5;    // validate: highest transform order checked
  double r = 0.5;   // cov-decay
  int n_max = 20;   // cov-decay
  std::vector<double> rs{0.25, 0.5, 0.75, 0.9};  // tau-scan
  std::vector<double> Cs{1.0, 2.0, 3.0};         // tau-scan, sup-tail
  std::vector<int> Ns{4, 8, 16, 32, 64};         // tau-scan
  double eps = 0.0;  // local-time bandwidth; 0 = dt^(1/2)
  std::string out = "results.csv";
  int workers = 1;  // 0 = hardware concurrency

  TimeGrid grid() const { return make_grid(horizon, steps); }
  double resolved_eps() const;
};

/// Applies one key=value pair; throws ConfigError on unknown key or
/// malformed/precondition-violating value.
void set_config_key(ExperimentConfig& cfg, std::string_view key,
                    std::string_view value);

/// Parses a config document (one key=value per line, '#' comments).
/// Errors carry the offending line number and constraint.
ExperimentConfig load_config(std::string_view text);

/// Cross-field checks shared by file loading and CLI overrides.
void validate_config(const ExperimentConfig& cfg);

struct ResultRow {
  std::string label;
  std::optional<double> r;
  std::optional<double> C;
  std::optional<int> N;
  std::optional<int> n;
  double value = 0.0;
  double std_error = 0.0;
  std::optional<std::int64_t> n_samples;
};

struct ResultSet {
  ExperimentConfig config;  // fully resolved provenance
  std::string experiment;
  std::uint64_t config_hash = 0;  // FNV-1a of the config echo
  std::vector<ResultRow> rows;    // sorted by (label, r, C, N, n)
  double wall_seconds = 0.0;      // not persisted
};

/// Runs the configured experiment. Deterministic for fixed (config, seed)
/// regardless of worker count: all merged statistics are exact integers or
/// per-path slots reduced in path order.
ResultSet run_experiment(const ExperimentConfig& cfg);

/// CSV per the fixed schema; byte-stable for a given ResultSet.
std::string render_csv(const ResultSet& rs);

/// Fully-resolved config, one key=value per line.
std::string render_config_echo(const ExperimentConfig& cfg);

/// Writes the CSV plus a `<path>.config.echo` sidecar.
void write_results(const ResultSet& rs, const std::filesystem::path& path);

/// Pass/fail evaluation for the `validate` experiment.
struct ValidationOutcome {
  bool passed = true;
  std::vector<std::string> failures;  // machine-readable, one per failure
};

ValidationOutcome check_validate_thresholds(const ResultSet& rs);

}  // namespace levylab
