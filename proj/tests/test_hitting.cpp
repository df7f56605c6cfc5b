#include <doctest.h>

#include <cmath>

#include "levylab/hitting.hpp"
#include "levylab/rng.hpp"

using namespace levylab;

namespace {

Path path_from(std::initializer_list<double> vals) {
  Path p;
  p.grid = make_grid(1.0, static_cast<std::int64_t>(vals.size()) - 1);
  p.values.resize(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double v : vals) p.values[i++] = v;
  return p;
}

/// Exhaustive scan over every (interval, level) pair, written directly from
/// the definition and kept independent of the production search order
/// shortcuts: first interval past r wins, smallest level within it.
TauResult brute_force_tau(const PathStack& stack, double r, double C,
                          int max_depth) {
  const TimeGrid& grid = stack.base.grid;
  for (std::int64_t i = 0; i < grid.steps; ++i) {
    if (!(grid.time_at(i + 1) > r)) continue;
    const double barrier =
        C * std::sqrt(std::max(0.0, 1.0 - grid.time_at(i + 1)));
    for (int n = 1; n <= max_depth; ++n) {
      const Eigen::ArrayXd& lvl = stack.level_values(n);
      if (!(lvl[i] * lvl[i + 1] <= 0.0)) continue;
      bool all_above = true;
      for (int k = 0; k < n; ++k) {
        const Eigen::ArrayXd& low = stack.level_values(k);
        if (!(std::min(std::abs(low[i]), std::abs(low[i + 1])) > barrier)) {
          all_above = false;
          break;
        }
      }
      if (all_above) return TauResult{true, grid.time_at(i + 1), n, false};
    }
  }
  return TauResult{};
}

}  // namespace

TEST_CASE("zero crossings: sign changes and exact zeros") {
  const Path p = path_from({0, 1, -1, 2});
  const auto all = zero_crossing_intervals(p, 0.0);
  REQUIRE(all.size() == 3);
  CHECK(all[0] == 0);  // p[0] = 0 makes the first interval a crossing
  CHECK(all[1] == 1);
  CHECK(all[2] == 2);

  const Path pos = path_from({1, 2, 3, 4});
  CHECK(zero_crossing_intervals(pos, 0.0).empty());

  // from_time = horizon - dt leaves at most the final interval.
  const Path q = path_from({0, 1, -1, 2, -3});
  const auto last_only = zero_crossing_intervals(q, 1.0 - q.grid.dt);
  REQUIRE(last_only.size() == 1);
  CHECK(last_only[0] == 3);
}

TEST_CASE("tau_estimate: hand-built stack with a level-1 hit") {
  // Base stays far from zero while its transform crosses: with sign(0) = -1
  // and positive signs afterwards, level 1 equals base - 2 * base[1], so it
  // crosses zero where the base crosses 5.2.
  const Path base = path_from({0, 2.6, 5.0, 5.4, 5.2});
  const PathStack stack = iterate_transforms(base, 2);
  REQUIRE(stack.iterates[0][1] == doctest::Approx(-2.6));
  REQUIRE(stack.iterates[0][2] == doctest::Approx(-0.2));
  REQUIRE(stack.iterates[0][3] == doctest::Approx(0.2));

  const TauResult res = tau_estimate(stack, 0.3, 2.0);
  CHECK(res.hit);
  CHECK_FALSE(res.censored);
  CHECK(res.tau_hat == doctest::Approx(0.75));
  CHECK(res.n_star == 1);

  const TauResult oracle = brute_force_tau(stack, 0.3, 2.0, 2);
  CHECK(oracle.hit == res.hit);
  CHECK(oracle.tau_hat == res.tau_hat);
  CHECK(oracle.n_star == res.n_star);
}

TEST_CASE("tau_estimate: unattainable barrier censors") {
  // No level-1 crossing on the final interval, and a barrier far above every
  // level before it.
  const Path base = path_from({0, 2.6, 5.0, 5.4, 5.6});
  const PathStack stack = iterate_transforms(base, 1);
  const TauResult res = tau_estimate(stack, 0.3, 1e6);
  CHECK(res.censored);
  CHECK_FALSE(res.hit);
}

TEST_CASE("tau_estimate: final interval has zero barrier") {
  // r = 1 - dt scans only the last interval, where sqrt((1-s)_+) = 0, so a
  // crossing with nonzero lower levels is a hit no matter how large C is.
  const Path base = path_from({0, 2.6, 5.0, 5.4, 5.2});
  const PathStack stack = iterate_transforms(base, 1);
  // level 1 = [0, -2.6, -0.2, 0.2, 0] crosses on the final interval.
  const TauResult res = tau_estimate(stack, 1.0 - base.grid.dt, 1e9);
  CHECK(res.hit);
  CHECK(res.tau_hat == doctest::Approx(1.0));
  CHECK(res.n_star == 1);
}

TEST_CASE("tau_estimate argument validation") {
  const Path base = path_from({0, 1, 2, 3, 4});
  const PathStack empty_stack = iterate_transforms(base, 0);
  CHECK_THROWS_AS(tau_estimate(empty_stack, 0.5, 1.0), std::invalid_argument);

  const PathStack stack = iterate_transforms(base, 1);
  CHECK_THROWS_AS(tau_estimate(stack, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(tau_estimate(stack, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(tau_estimate(stack, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(tau_estimate(stack, 0.5, 1.0, 0), std::invalid_argument);

  Path two_horizon = base;
  two_horizon.grid = make_grid(2.0, 4);
  const PathStack bad = iterate_transforms(two_horizon, 1);
  CHECK_THROWS_AS(tau_estimate(bad, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("tau_estimate equals the exhaustive scan on random stacks") {
  const TimeGrid g = make_grid(1.0, 64);
  const SeedSpec seeds{555, "oracle"};
  const double rs[] = {0.1, 0.5, 0.9};
  const double cs[] = {0.5, 1.0, 2.0};
  for (std::uint64_t idx = 0; idx < 200; ++idx) {
    const PathStack stack = iterate_transforms(sample_path(g, seeds, idx), 4);
    for (double r : rs)
      for (double C : cs) {
        const TauResult got = tau_estimate(stack, r, C);
        const TauResult want = brute_force_tau(stack, r, C, 4);
        CHECK(got.hit == want.hit);
        CHECK(got.censored == want.censored);
        if (want.hit) {
          CHECK(got.tau_hat == want.tau_hat);
          CHECK(got.n_star == want.n_star);
        }
      }
  }
}

TEST_CASE("hit indicator monotone in depth, tau_hat nonincreasing") {
  const TimeGrid g = make_grid(1.0, 128);
  const SeedSpec seeds{81, "monotone"};
  for (std::uint64_t idx = 0; idx < 50; ++idx) {
    const PathStack stack = iterate_transforms(sample_path(g, seeds, idx), 16);
    bool prev_hit = false;
    double prev_tau = 2.0;
    for (int N : {1, 2, 4, 8, 16}) {
      const TauResult res = tau_estimate(stack, 0.25, 1.5, N);
      if (prev_hit) {
        CHECK(res.hit);
        CHECK(res.tau_hat <= prev_tau);
      }
      if (res.hit) {
        prev_hit = true;
        prev_tau = res.tau_hat;
      }
    }
  }
}

TEST_CASE("hit indicator nonincreasing in C") {
  const TimeGrid g = make_grid(1.0, 128);
  const SeedSpec seeds{82, "c-monotone"};
  for (std::uint64_t idx = 0; idx < 50; ++idx) {
    const PathStack stack = iterate_transforms(sample_path(g, seeds, idx), 8);
    bool prev_hit = true;
    for (double C : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const bool hit = tau_estimate(stack, 0.5, C).hit;
      if (!prev_hit) CHECK_FALSE(hit);
      prev_hit = hit;
    }
  }
}

TEST_CASE("tau_min_depths agrees with per-depth tau_estimate") {
  const TimeGrid g = make_grid(1.0, 64);
  const SeedSpec seeds{4242, "mindepth"};
  const std::vector<double> rs = {0.2, 0.5, 0.8};
  for (std::uint64_t idx = 0; idx < 100; ++idx) {
    const PathStack stack = iterate_transforms(sample_path(g, seeds, idx), 8);
    for (double C : {0.5, 1.5}) {
      const std::vector<int> depths = tau_min_depths(stack, C, rs);
      for (std::size_t j = 0; j < rs.size(); ++j)
        for (int N : {1, 2, 4, 8}) {
          const bool hit = tau_estimate(stack, rs[j], C, N).hit;
          CHECK(hit == (depths[j] <= N));
        }
    }
  }
}
