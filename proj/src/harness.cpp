#include "levylab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "levylab/estimators.hpp"
#include "levylab/parallel.hpp"
#include "levylab/rng.hpp"
#include "levylab/transform.hpp"

namespace levylab {

namespace {

constexpr std::string_view kKindNames[] = {"validate", "tau-scan", "cov-decay",
                                           "sup-tail"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    throw ConfigError("key '" + std::string(key) + "': malformed value '" +
                      std::string(value) + "'");
  return out;
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view value) {
  std::vector<T> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    const std::size_t comma = std::min(value.find(',', pos), value.size());
    const std::string_view item = trim(value.substr(pos, comma - pos));
    if (item.empty())
      throw ConfigError("key '" + std::string(key) + "': empty list element");
    out.push_back(parse_number<T>(key, item));
    pos = comma + 1;
  }
  return out;
}

std::string fmt_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

template <typename T>
std::string fmt_int(T x) {
  char buf[24];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_same_v<T, double>)
      out += fmt_double(xs[i]);
    else
      out += fmt_int(xs[i]);
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

bool row_less(const ResultRow& a, const ResultRow& b) {
  auto opt_less = [](const auto& x, const auto& y) {
    if (x.has_value() != y.has_value()) return !x.has_value();
    return x.has_value() && *x < *y;
  };
  auto opt_eq = [](const auto& x, const auto& y) {
    return x.has_value() == y.has_value() && (!x.has_value() || *x == *y);
  };
  if (a.label != b.label) return a.label < b.label;
  if (!opt_eq(a.r, b.r)) return opt_less(a.r, b.r);
  if (!opt_eq(a.C, b.C)) return opt_less(a.C, b.C);
  if (!opt_eq(a.N, b.N)) return opt_less(a.N, b.N);
  return opt_less(a.n, b.n);
}

void run_cov_decay(const ExperimentConfig& cfg, ResultSet& out) {
  const CovarianceSeries series = estimate_sign_covariance(
      cfg.r, cfg.n_max, cfg.paths, cfg.grid(),
      SeedSpec{cfg.seed, "cov-decay"}, cfg.workers);
  for (int n = 0; n < static_cast<int>(series.by_order.size()); ++n) {
    const EstimateWithCI& e = series.by_order[static_cast<std::size_t>(n)];
    out.rows.push_back(ResultRow{"cov_hn", series.r_snapped, std::nullopt,
                                 std::nullopt, n, e.value, e.std_error,
                                 e.n_samples});
  }
}

void run_tau_scan(const ExperimentConfig& cfg, ResultSet& out) {
  const TauScan scan =
      estimate_tau_scan(cfg.rs, cfg.Cs, cfg.Ns, cfg.paths, cfg.grid(),
                        SeedSpec{cfg.seed, "tau-scan"}, cfg.workers);
  for (const TauScanCell& cell : scan.cells)
    out.rows.push_back(ResultRow{"tau_lt_1", cell.r, cell.C, cell.N,
                                 std::nullopt, cell.estimate.value,
                                 cell.estimate.std_error,
                                 cell.estimate.n_samples});
}

void run_sup_tail(const ExperimentConfig& cfg, ResultSet& out) {
  const TimeGrid grid = cfg.grid();
  const SeedSpec seeds{cfg.seed, "sup-tail"};
  const int workers = resolve_workers(cfg.workers);
  const std::size_t n_c = cfg.Cs.size();
  std::vector<std::vector<std::int64_t>> counts(
      static_cast<std::size_t>(workers), std::vector<std::int64_t>(n_c, 0));
  parallel_for_paths(cfg.paths, workers,
                     [&](std::int64_t begin, std::int64_t end, int w) {
                       std::vector<std::int64_t>& acc =
                           counts[static_cast<std::size_t>(w)];
                       Path path;
                       for (std::int64_t idx = begin; idx < end; ++idx) {
                         sample_path_into(path, grid, seeds,
                                          static_cast<std::uint64_t>(idx));
                         const double sup = path.values.abs().maxCoeff();
                         for (std::size_t ic = 0; ic < n_c; ++ic)
                           if (sup > cfg.Cs[ic]) ++acc[ic];
                       }
                     });
  for (std::size_t ic = 0; ic < n_c; ++ic) {
    std::int64_t total = 0;
    for (int w = 0; w < workers; ++w)
      total += counts[static_cast<std::size_t>(w)][ic];
    const double p =
        static_cast<double>(total) / static_cast<double>(cfg.paths);
    const double se =
        std::sqrt(std::max(0.0, p * (1.0 - p)) /
                  static_cast<double>(cfg.paths));
    out.rows.push_back(ResultRow{"sup_tail_mc", std::nullopt, cfg.Cs[ic],
                                 std::nullopt, std::nullopt, p, se,
                                 cfg.paths});
    out.rows.push_back(ResultRow{"sup_tail_analytic", std::nullopt, cfg.Cs[ic],
                                 std::nullopt, std::nullopt,
                                 sup_abs_tail_analytic(cfg.Cs[ic]), 0.0,
                                 std::nullopt});
  }
}

void run_validate(const ExperimentConfig& cfg, ResultSet& out) {
  const TimeGrid grid = cfg.grid();
  const SeedSpec seeds{cfg.seed, "validate"};
  const int orders = cfg.depth;
  // Per-path slots keep the reduction order independent of scheduling.
  Eigen::ArrayXXd terminal(cfg.paths, orders);
  Eigen::ArrayXd qv(cfg.paths);
  parallel_for_paths(
      cfg.paths, cfg.workers, [&](std::int64_t begin, std::int64_t end, int) {
        Path path;
        PathStack stack;
        for (std::int64_t idx = begin; idx < end; ++idx) {
          sample_path_into(path, grid, seeds, static_cast<std::uint64_t>(idx));
          qv[idx] = (path.values.tail(grid.steps) - path.values.head(grid.steps))
                        .square()
                        .sum();
          iterate_transforms_into(stack, path, orders);
          for (int n = 1; n <= orders; ++n)
            terminal(idx, n - 1) =
                stack.iterates[static_cast<std::size_t>(n - 1)][grid.steps];
        }
      });
  for (int n = 1; n <= orders; ++n) {
    const KsResult ks = ks_test(
        std::span<const double>(terminal.col(n - 1).data(),
                                static_cast<std::size_t>(cfg.paths)),
        grid.horizon);
    out.rows.push_back(ResultRow{"ks_pvalue", std::nullopt, std::nullopt,
                                 std::nullopt, n, ks.p_value, 0.0, cfg.paths});
  }
  const double mean = qv.mean();
  const double var =
      (qv - mean).square().sum() / static_cast<double>(cfg.paths - 1);
  out.rows.push_back(ResultRow{
      "qv_mean", std::nullopt, std::nullopt, std::nullopt, std::nullopt, mean,
      std::sqrt(var / static_cast<double>(cfg.paths)), cfg.paths});
}

}  // namespace

std::string_view kind_name(ExperimentKind kind) {
  return kKindNames[static_cast<int>(kind)];
}

std::optional<ExperimentKind> kind_from_name(std::string_view name) {
  for (int i = 0; i < 4; ++i)
    if (kKindNames[i] == name) return static_cast<ExperimentKind>(i);
  return std::nullopt;
}

double ExperimentConfig::resolved_eps() const {
  return eps > 0.0 ? eps : std::sqrt(horizon / static_cast<double>(steps));
}

void set_config_key(ExperimentConfig& cfg, std::string_view key,
                    std::string_view value) {
  if (key == "kind") {
    const auto k = kind_from_name(value);
    if (!k)
      throw ConfigError("key 'kind': unknown kind '" + std::string(value) +
                        "' (allowed: validate, tau-scan, cov-decay, sup-tail)");
    cfg.kind = *k;
  } else if (key == "horizon") {
    cfg.horizon = parse_number<double>(key, value);
    if (!(cfg.horizon > 0.0))
      throw ConfigError("key 'horizon': must be > 0");
  } else if (key == "steps") {
    cfg.steps = parse_number<std::int64_t>(key, value);
    if (cfg.steps < 1) throw ConfigError("key 'steps': must be >= 1");
  } else if (key == "paths") {
    cfg.paths = parse_number<std::int64_t>(key, value);
    if (cfg.paths < 1) throw ConfigError("key 'paths': must be >= 1");
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "depth") {
    cfg.depth = parse_number<int>(key, value);
    if (cfg.depth < 1) throw ConfigError("key 'depth': must be >= 1");
  } else if (key == "r") {
    cfg.r = parse_number<double>(key, value);
    if (!(cfg.r > 0.0 && cfg.r < 1.0))
      throw ConfigError("key 'r': must be in (0, 1)");
  } else if (key == "n_max") {
    cfg.n_max = parse_number<int>(key, value);
    if (cfg.n_max < 0) throw ConfigError("key 'n_max': must be >= 0");
  } else if (key == "rs") {
    cfg.rs = parse_list<double>(key, value);
    for (double r : cfg.rs)
      if (!(r > 0.0 && r < 1.0))
        throw ConfigError("key 'rs': every entry must be in (0, 1)");
  } else if (key == "Cs") {
    cfg.Cs = parse_list<double>(key, value);
    for (double c : cfg.Cs)
      if (!(c > 0.0)) throw ConfigError("key 'Cs': every entry must be > 0");
  } else if (key == "Ns") {
    cfg.Ns = parse_list<int>(key, value);
    for (int n : cfg.Ns)
      if (n < 1) throw ConfigError("key 'Ns': every entry must be >= 1");
  } else if (key == "eps") {
    cfg.eps = parse_number<double>(key, value);
    if (!(cfg.eps > 0.0)) throw ConfigError("key 'eps': must be > 0");
  } else if (key == "out") {
    if (value.empty()) throw ConfigError("key 'out': must be nonempty");
    cfg.out = std::string(value);
  } else if (key == "workers") {
    cfg.workers = parse_number<int>(key, value);
    if (cfg.workers < 0) throw ConfigError("key 'workers': must be >= 0");
  } else {
    throw ConfigError("unknown key '" + std::string(key) + "'");
  }
}

ExperimentConfig load_config(std::string_view text) {
  ExperimentConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key=value, got '" + std::string(line) + "'");
    try {
      set_config_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate_config(cfg);
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  if (!(cfg.horizon > 0.0)) throw ConfigError("horizon must be > 0");
  if (cfg.steps < 1) throw ConfigError("steps must be >= 1");
  if (cfg.paths < 1) throw ConfigError("paths must be >= 1");
  if (cfg.kind == ExperimentKind::cov_decay && !(cfg.r < cfg.horizon))
    throw ConfigError("r must be below the horizon");
  if (cfg.kind == ExperimentKind::tau_scan && cfg.horizon != 1.0)
    throw ConfigError("tau-scan requires horizon = 1");
  if (cfg.kind == ExperimentKind::tau_scan &&
      (cfg.rs.empty() || cfg.Cs.empty() || cfg.Ns.empty()))
    throw ConfigError("tau-scan requires nonempty rs, Cs, Ns");
  if (cfg.kind == ExperimentKind::sup_tail && cfg.Cs.empty())
    throw ConfigError("sup-tail requires nonempty Cs");
}

ResultSet run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (!cfg.kind)
    throw ConfigError(
        "no experiment kind set (allowed: validate, tau-scan, cov-decay, "
        "sup-tail)");
  ResultSet out;
  out.config = cfg;
  out.experiment = std::string(kind_name(*cfg.kind));
  const std::string echo = render_config_echo(cfg);
  out.config_hash = fnv1a64(echo);

  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (*cfg.kind) {
      case ExperimentKind::validate: run_validate(cfg, out); break;
      case ExperimentKind::tau_scan: run_tau_scan(cfg, out); break;
      case ExperimentKind::cov_decay: run_cov_decay(cfg, out); break;
      case ExperimentKind::sup_tail: run_sup_tail(cfg, out); break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error("experiment " + out.experiment +
                             " (seed=" + fmt_int(cfg.seed) +
                             ", steps=" + fmt_int(cfg.steps) +
                             ", paths=" + fmt_int(cfg.paths) +
                             ") failed: " + e.what());
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::sort(out.rows.begin(), out.rows.end(), row_less);
  return out;
}

std::string render_csv(const ResultSet& rs) {
  std::string out =
      "experiment,label,r,C,N,n,value,std_error,n_samples,seed,steps,paths\n";
  auto opt_d = [](const std::optional<double>& x) {
    return x ? fmt_double(*x) : std::string();
  };
  auto opt_i = [](const auto& x) {
    return x ? fmt_int(*x) : std::string();
  };
  for (const ResultRow& row : rs.rows) {
    out += rs.experiment;
    out += ',';
    out += row.label;
    out += ',';
    out += opt_d(row.r);
    out += ',';
    out += opt_d(row.C);
    out += ',';
    out += opt_i(row.N);
    out += ',';
    out += opt_i(row.n);
    out += ',';
    out += fmt_double(row.value);
    out += ',';
    out += fmt_double(row.std_error);
    out += ',';
    out += opt_i(row.n_samples);
    out += ',';
    out += fmt_int(rs.config.seed);
    out += ',';
    out += fmt_int(rs.config.steps);
    out += ',';
    out += fmt_int(rs.config.paths);
    out += '\n';
  }
  return out;
}

std::string render_config_echo(const ExperimentConfig& cfg) {
  std::string out;
  out += "kind=";
  out += cfg.kind ? std::string(kind_name(*cfg.kind)) : std::string("unset");
  out += "\nhorizon=" + fmt_double(cfg.horizon);
  out += "\nsteps=" + fmt_int(cfg.steps);
  out += "\npaths=" + fmt_int(cfg.paths);
  out += "\nseed=" + fmt_int(cfg.seed);
  out += "\ndepth=" + fmt_int(cfg.depth);
  out += "\nr=" + fmt_double(cfg.r);
  out += "\nn_max=" + fmt_int(cfg.n_max);
  out += "\nrs=" + join(cfg.rs);
  out += "\nCs=" + join(cfg.Cs);
  out += "\nNs=" + join(cfg.Ns);
  out += "\neps=" + fmt_double(cfg.resolved_eps());
  out += "\nout=" + cfg.out;
  out += "\nworkers=" + fmt_int(cfg.workers);
  out += "\n";
  return out;
}

void write_results(const ResultSet& rs, const std::filesystem::path& path) {
  auto write_file = [](const std::filesystem::path& p, const std::string& data) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + p.string() + "'");
    f << data;
    f.flush();
    if (!f) throw std::runtime_error("write failed for '" + p.string() + "'");
  };
  write_file(path, render_csv(rs));
  std::filesystem::path echo = path;
  echo += ".config.echo";
  write_file(echo, render_config_echo(rs.config));
}

ValidationOutcome check_validate_thresholds(const ResultSet& rs) {
  ValidationOutcome out;
  for (const ResultRow& row : rs.rows) {
    if (row.label == "ks_pvalue" && !(row.value > 0.001)) {
      out.passed = false;
      out.failures.push_back("check=ks_pvalue n=" + std::to_string(*row.n) +
                             " value=" + fmt_double(row.value) +
                             " threshold=0.001");
    }
    if (row.label == "qv_mean") {
      const double rel =
          std::abs(row.value - rs.config.horizon) / rs.config.horizon;
      if (!(rel <= 0.01)) {
        out.passed = false;
        out.failures.push_back("check=qv_mean value=" + fmt_double(row.value) +
                               " horizon=" + fmt_double(rs.config.horizon) +
                               " rel_err=" + fmt_double(rel) +
                               " threshold=0.01");
      }
    }
  }
  return out;
}

}  // namespace levylab
