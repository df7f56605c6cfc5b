#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "levylab/harness.hpp"

using namespace levylab;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("load_config: defaults, comments, and lists") {
  const ExperimentConfig cfg = load_config(
      "# covariance decay run\n"
      "kind=cov-decay\n"
      "paths=100000\n"
      "seed=42\n"
      "r=0.5\n"
      "n_max=20\n");
  REQUIRE(cfg.kind.has_value());
  CHECK(*cfg.kind == ExperimentKind::cov_decay);
  CHECK(cfg.paths == 100000);
  CHECK(cfg.seed == 42);
  CHECK(cfg.r == 0.5);
  CHECK(cfg.n_max == 20);
  CHECK(cfg.horizon == 1.0);   // default
  CHECK(cfg.steps == 4096);    // default
  CHECK(cfg.resolved_eps() == doctest::Approx(std::sqrt(1.0 / 4096.0)));

  const ExperimentConfig lists = load_config(
      "kind=tau-scan\nrs=0.25, 0.5\nCs=1,2\nNs=4,8,16\nworkers=0\n");
  CHECK(lists.rs == std::vector<double>{0.25, 0.5});
  CHECK(lists.Cs == std::vector<double>{1.0, 2.0});
  CHECK(lists.Ns == std::vector<int>{4, 8, 16});
}

TEST_CASE("load_config: errors carry line numbers and constraints") {
  CHECK_THROWS_WITH_AS(load_config("steps=0\n"),
                       "line 1: key 'steps': must be >= 1", ConfigError);
  CHECK_THROWS_WITH_AS(
      load_config("kind=unknown\n"),
      "line 1: key 'kind': unknown kind 'unknown' (allowed: validate, "
      "tau-scan, cov-decay, sup-tail)",
      ConfigError);
  CHECK_THROWS_WITH_AS(load_config("paths=10\nfrobnicate=1\n"),
                       "line 2: unknown key 'frobnicate'", ConfigError);
  CHECK_THROWS_AS(load_config("paths=ten\n"), ConfigError);
  CHECK_THROWS_AS(load_config("just some text\n"), ConfigError);
  CHECK_THROWS_AS(load_config("r=1.5\n"), ConfigError);
  CHECK_THROWS_AS(load_config("rs=0.5,,0.7\n"), ConfigError);
}

TEST_CASE("run_experiment needs a kind") {
  ExperimentConfig cfg;
  cfg.paths = 10;
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("cov-decay results are identical across worker counts") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::cov_decay;
  cfg.steps = 128;
  cfg.paths = 10;
  cfg.n_max = 2;
  cfg.seed = 321;
  cfg.workers = 1;
  const ResultSet one = run_experiment(cfg);
  cfg.workers = 8;
  const ResultSet eight = run_experiment(cfg);
  CHECK(render_csv(one) == render_csv(eight));
}

TEST_CASE("validate emits KS rows for n=1..depth plus a QV row") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::validate;
  cfg.steps = 256;
  cfg.paths = 500;
  cfg.seed = 2;
  const ResultSet rs = run_experiment(cfg);
  int ks_rows = 0, qv_rows = 0;
  for (const ResultRow& row : rs.rows) {
    if (row.label == "ks_pvalue") {
      ++ks_rows;
      REQUIRE(row.n.has_value());
      CHECK(*row.n >= 1);
      CHECK(*row.n <= 5);
    }
    if (row.label == "qv_mean") {
      ++qv_rows;
      CHECK(row.value == doctest::Approx(1.0).epsilon(0.05));
    }
  }
  CHECK(ks_rows == 5);
  CHECK(qv_rows == 1);
  CHECK(check_validate_thresholds(rs).passed);
}

TEST_CASE("tau-scan rows are N-monotone on shared paths") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::tau_scan;
  cfg.steps = 256;
  cfg.paths = 200;
  cfg.seed = 77;
  cfg.rs = {0.5};
  cfg.Cs = {1.0};
  cfg.Ns = {4, 8};
  const ResultSet rs = run_experiment(cfg);
  REQUIRE(rs.rows.size() == 2);
  CHECK(rs.rows[0].label == "tau_lt_1");
  REQUIRE(rs.rows[0].N.has_value());
  CHECK(*rs.rows[0].N == 4);
  CHECK(rs.rows[1].value >= rs.rows[0].value);
}

TEST_CASE("CSV rendering: header, ordering, byte stability") {
  ResultSet rs;
  rs.experiment = "cov-decay";
  rs.config.seed = 9;
  rs.config.steps = 64;
  rs.config.paths = 3;

  SUBCASE("empty row set gives a header-only file") {
    const std::string csv = render_csv(rs);
    CHECK(csv ==
          "experiment,label,r,C,N,n,value,std_error,n_samples,seed,steps,"
          "paths\n");
  }

  SUBCASE("three rows give four lines in declared field order") {
    rs.rows.push_back(ResultRow{"cov_hn", 0.5, std::nullopt, std::nullopt, 0,
                                1.0, 0.0, 3});
    rs.rows.push_back(ResultRow{"cov_hn", 0.5, std::nullopt, std::nullopt, 1,
                                0.25, 0.125, 3});
    rs.rows.push_back(ResultRow{"cov_hn", 0.5, std::nullopt, std::nullopt, 2,
                                -0.5, 0.25, 3});
    const std::string csv = render_csv(rs);
    CHECK(csv ==
          "experiment,label,r,C,N,n,value,std_error,n_samples,seed,steps,paths\n"
          "cov-decay,cov_hn,0.5,,,0,1,0,3,9,64,3\n"
          "cov-decay,cov_hn,0.5,,,1,0.25,0.125,3,9,64,3\n"
          "cov-decay,cov_hn,0.5,,,2,-0.5,0.25,3,9,64,3\n");
    CHECK(render_csv(rs) == csv);
  }
}

TEST_CASE("write_results produces byte-identical files and a sidecar") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::cov_decay;
  cfg.steps = 64;
  cfg.paths = 20;
  cfg.n_max = 1;
  cfg.seed = 5;
  const ResultSet rs = run_experiment(cfg);

  const auto dir = std::filesystem::temp_directory_path() / "levylab_test";
  std::filesystem::create_directories(dir);
  const auto a = dir / "a.csv";
  const auto b = dir / "b.csv";
  write_results(rs, a);
  write_results(rs, b);
  CHECK(slurp(a) == slurp(b));
  CHECK(std::filesystem::exists(dir / "a.csv.config.echo"));
  CHECK(slurp(dir / "a.csv.config.echo") == render_config_echo(cfg));

  // 4 lines: header + n = 0, 1 rows... n_max=1 gives 2 rows.
  int lines = 0;
  for (char c : slurp(a))
    if (c == '\n') ++lines;
  CHECK(lines == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("rows sort by (label, r, C, N, n) with empties first") {
  ResultSet rs;
  rs.experiment = "sup-tail";
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::sup_tail;
  cfg.steps = 64;
  cfg.paths = 30;
  cfg.Cs = {2.0, 1.0};
  const ResultSet run = run_experiment(cfg);
  REQUIRE(run.rows.size() == 4);
  CHECK(run.rows[0].label == "sup_tail_analytic");
  CHECK(*run.rows[0].C == 1.0);
  CHECK(*run.rows[1].C == 2.0);
  CHECK(run.rows[2].label == "sup_tail_mc");
  CHECK(*run.rows[2].C == 1.0);
  CHECK(*run.rows[3].C == 2.0);
}

TEST_CASE("validate thresholds flag bad rows with machine-readable lines") {
  ResultSet rs;
  rs.experiment = "validate";
  rs.config.horizon = 1.0;
  rs.rows.push_back(ResultRow{"ks_pvalue", std::nullopt, std::nullopt,
                              std::nullopt, 2, 0.0002, 0.0, 100});
  rs.rows.push_back(ResultRow{"qv_mean", std::nullopt, std::nullopt,
                              std::nullopt, std::nullopt, 1.05, 0.001, 100});
  const ValidationOutcome out = check_validate_thresholds(rs);
  CHECK_FALSE(out.passed);
  REQUIRE(out.failures.size() == 2);
  CHECK(out.failures[0].find("check=ks_pvalue n=2") != std::string::npos);
  CHECK(out.failures[0].find("threshold=0.001") != std::string::npos);
  CHECK(out.failures[1].find("check=qv_mean") != std::string::npos);
}

TEST_CASE("config echo is fully resolved and stable") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::tau_scan;
  const std::string echo = render_config_echo(cfg);
  CHECK(echo.find("kind=tau-scan\n") != std::string::npos);
  CHECK(echo.find("steps=4096\n") != std::string::npos);
  CHECK(echo.find("rs=0.25,0.5,0.75,0.9\n") != std::string::npos);
  CHECK(echo.find("eps=0.015625\n") != std::string::npos);
  CHECK(render_config_echo(cfg) == echo);
}
