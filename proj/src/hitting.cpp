#include "levylab/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levylab {

namespace {

void check_tau_args(const PathStack& stack, double r, double C) {
  if (stack.depth() < 1)
    throw std::invalid_argument("tau_estimate: stack depth must be >= 1");
  if (stack.base.grid.horizon != 1.0)
    throw std::invalid_argument("tau_estimate: grid horizon must be 1");
  if (!(r > 0.0 && r < 1.0))
    throw std::invalid_argument("tau_estimate: r must be in (0, 1)");
  if (!(C > 0.0)) throw std::invalid_argument("tau_estimate: C must be > 0");
}

/// First interval index whose right endpoint lies strictly after r.
std::int64_t first_interval_after(const TimeGrid& grid, double r) {
  std::int64_t i = static_cast<std::int64_t>(std::floor(r / grid.dt));
  while (i > 0 && grid.time_at(i) > r) --i;
  while (grid.time_at(i + 1) <= r) ++i;
  return i;
}

}  // namespace

std::vector<std::int64_t> zero_crossing_intervals(const Path& p,
                                                  double from_time) {
  check_path(p);
  std::vector<std::int64_t> out;
  const std::int64_t steps = p.grid.steps;
  for (std::int64_t i = 0; i < steps; ++i) {
    if (p.grid.time_at(i) < from_time) continue;
    if (p.values[i] * p.values[i + 1] <= 0.0) out.push_back(i);
  }
  return out;
}

int interval_min_depth(const PathStack& stack, std::int64_t i, double C,
                       int max_depth) {
  const TimeGrid& grid = stack.base.grid;
  const double barrier =
      C * std::sqrt(std::max(0.0, 1.0 - grid.time_at(i + 1)));
  double prefix_min = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= max_depth; ++n) {
    const Eigen::ArrayXd& below = stack.level_values(n - 1);
    prefix_min = std::min(
        prefix_min, std::min(std::abs(below[i]), std::abs(below[i + 1])));
    if (!(prefix_min > barrier)) return kNoHit;  // monotone in n: stop
    const Eigen::ArrayXd& lvl = stack.level_values(n);
    if (lvl[i] * lvl[i + 1] <= 0.0) return n;
  }
  return kNoHit;
}

TauResult tau_estimate(const PathStack& stack, double r, double C,
                       int max_depth) {
  check_tau_args(stack, r, C);
  if (max_depth == 0)
    throw std::invalid_argument("tau_estimate: max_depth must be >= 1");
  const int N = max_depth < 0 ? stack.depth()
                              : std::min(max_depth, stack.depth());
  const TimeGrid& grid = stack.base.grid;
  for (std::int64_t i = first_interval_after(grid, r); i < grid.steps; ++i) {
    const int n = interval_min_depth(stack, i, C, N);
    if (n != kNoHit)
      return TauResult{true, grid.time_at(i + 1), n, false};
  }
  return TauResult{};
}

std::vector<int> tau_min_depths(const PathStack& stack, double C,
                                std::span<const double> rs) {
  if (rs.empty())
    throw std::invalid_argument("tau_min_depths: rs must be nonempty");
  for (double r : rs) check_tau_args(stack, r, C);

  const TimeGrid& grid = stack.base.grid;
  std::vector<std::int64_t> starts(rs.size());
  std::int64_t lowest = grid.steps;
  for (std::size_t j = 0; j < rs.size(); ++j) {
    starts[j] = first_interval_after(grid, rs[j]);
    lowest = std::min(lowest, starts[j]);
  }

  std::vector<int> result(rs.size(), kNoHit);
  int run_min = kNoHit;
  for (std::int64_t i = grid.steps - 1; i >= lowest; --i) {
    run_min = std::min(run_min, interval_min_depth(stack, i, C, stack.depth()));
    for (std::size_t j = 0; j < rs.size(); ++j)
      if (starts[j] == i) result[j] = run_min;
    if (run_min == 1) {
      // Depth 1 is the floor; every checkpoint further left sees it too.
      for (std::size_t j = 0; j < rs.size(); ++j)
        if (starts[j] < i) result[j] = 1;
      break;
    }
  }
  return result;
}

}  // namespace levylab
