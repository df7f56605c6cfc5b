#include "levylab/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <sstream>

namespace levylab {

namespace {

struct ParsedApp {
  CLI::App app{
      "levylab: Monte Carlo laboratory for the iterated sign-integral "
      "transform of Brownian motion"};
  Command cmd;
  std::vector<std::string> sets;
  std::string kind_name_for_plot;
  std::string out_flag;
  int workers_flag = -1;
  std::uint64_t seed_flag = 0;
  bool seed_given = false;

  CLI::App* add_run(std::string name, std::string desc,
                    std::optional<ExperimentKind> kind) {
    CLI::App* sub = app.add_subcommand(std::move(name), std::move(desc));
    sub->add_option("--config", cmd.config_path, "experiment config file");
    sub->add_option("--set", sets, "override a config key (key=value)")
        ->take_all();
    sub->add_option("--out", out_flag, "output CSV path");
    sub->add_option("--workers", workers_flag, "worker thread count (0 = all cores)");
    sub->add_option("--seed", seed_flag, "root seed")
        ->each([this](const std::string&) { seed_given = true; });
    sub->callback([this, kind] {
      cmd.action = Command::Action::run;
      cmd.forced_kind = kind;
    });
    return sub;
  }
};

std::pair<std::string, std::string> split_set(const std::string& kv) {
  const std::size_t eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    throw UsageError("--set expects key=value, got '" + kv + "'");
  return {kv.substr(0, eq), kv.substr(eq + 1)};
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

void print_rows(const ResultSet& rs, std::ostream& out) {
  out << "experiment: " << rs.experiment << "  rows: " << rs.rows.size()
      << "  wall: " << rs.wall_seconds << "s\n";
  for (const ResultRow& row : rs.rows) {
    out << "  " << row.label;
    if (row.r) out << " r=" << *row.r;
    if (row.C) out << " C=" << *row.C;
    if (row.N) out << " N=" << *row.N;
    if (row.n) out << " n=" << *row.n;
    out << " value=" << row.value;
    if (row.std_error > 0.0) out << " +-" << row.std_error;
    out << "\n";
  }
}

}  // namespace

Command parse_args(const std::vector<std::string>& args) {
  ParsedApp p;
  p.app.require_subcommand(1);

  p.add_run("simulate", "run the experiment named by the config's kind",
            std::nullopt);
  p.add_run("validate", "statistical self-checks (KS, quadratic variation)",
            ExperimentKind::validate);
  p.add_run("tau-scan", "estimate P(tau_{r,C} < 1) over (r, C, N)",
            ExperimentKind::tau_scan);
  p.add_run("cov-decay", "estimate E[h^n_r h^n_1] for n = 0..n_max",
            ExperimentKind::cov_decay);
  p.add_run("sup-tail", "P(sup |B| > C): Monte Carlo vs analytic series",
            ExperimentKind::sup_tail);

  CLI::App* plot = p.app.add_subcommand("plot", "render a results CSV as SVG");
  plot->add_option("input", p.cmd.plot_input, "results CSV")->required();
  plot->add_option("--kind", p.kind_name_for_plot,
                   "cov-decay | tau-scan | sup-tail (default: inferred)");
  plot->add_option("--out", p.out_flag, "output SVG path");
  plot->callback([&p] { p.cmd.action = Command::Action::plot; });

  std::vector<const char*> argv;
  argv.push_back("levylab");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    p.app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    std::string help = p.app.help();
    const auto parsed = p.app.get_subcommands();
    if (!parsed.empty()) help = parsed.front()->help();
    throw HelpRequested{std::move(help)};
  } catch (const CLI::ParseError& e) {
    throw UsageError(std::string(e.what()));
  }

  for (const std::string& kv : p.sets) p.cmd.overrides.push_back(split_set(kv));
  if (!p.out_flag.empty()) p.cmd.out = p.out_flag;
  if (p.workers_flag >= 0) p.cmd.workers = p.workers_flag;
  if (p.seed_given) p.cmd.seed = p.seed_flag;
  if (p.cmd.action == Command::Action::plot && !p.kind_name_for_plot.empty()) {
    p.cmd.plot_kind = plot_kind_from_name(p.kind_name_for_plot);
    if (!p.cmd.plot_kind)
      throw UsageError("--kind must be cov-decay, tau-scan or sup-tail");
  }
  return p.cmd;
}

ExperimentConfig resolve_config(const Command& cmd) {
  ExperimentConfig cfg;
  if (!cmd.config_path.empty()) cfg = load_config(read_file(cmd.config_path));
  if (cmd.forced_kind) cfg.kind = cmd.forced_kind;
  for (const auto& [key, value] : cmd.overrides) {
    try {
      set_config_key(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("--set " + key + "=" + value + ": " + e.what());
    }
  }
  if (cmd.seed) cfg.seed = *cmd.seed;
  if (cmd.workers) cfg.workers = *cmd.workers;
  if (cmd.out) cfg.out = *cmd.out;
  validate_config(cfg);
  return cfg;
}

int run_command(const Command& cmd, std::ostream& out, std::ostream& err) {
  if (cmd.action == Command::Action::plot) {
    const std::string svg_out = cmd.out.value_or("plot.svg");
    emit_plot(cmd.plot_input, cmd.plot_kind, svg_out);
    out << "wrote " << svg_out << "\n";
    return 0;
  }

  const ExperimentConfig cfg = resolve_config(cmd);
  const ResultSet rs = run_experiment(cfg);
  write_results(rs, cfg.out);
  print_rows(rs, out);
  out << "wrote " << cfg.out << " and " << cfg.out << ".config.echo\n";

  if (cfg.kind == ExperimentKind::validate) {
    const ValidationOutcome outcome = check_validate_thresholds(rs);
    if (!outcome.passed) {
      for (const std::string& f : outcome.failures) err << "FAIL " << f << "\n";
      return 1;
    }
    out << "validate: all thresholds passed\n";
  }
  return 0;
}

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const Command cmd = parse_args(args);
    return run_command(cmd, out, err);
  } catch (const HelpRequested& h) {
    out << h.text;
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n"
        << "run 'levylab --help' for usage\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace levylab
