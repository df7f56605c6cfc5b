#pragma once

#include <limits>
#include <span>
#include <vector>

#include "levylab/transform.hpp"

namespace levylab {

/// Outcome of the stopping-time search on one stack: either the first
/// qualifying interval's right endpoint (hit) or censored at the horizon.
struct TauResult {
  bool hit = false;
  double tau_hat = 0.0;  // in (r, 1] when hit
  int n_star = 0;        // smallest level achieving the hit, in [1, N]
  bool censored = true;
};

/// Sentinel for "no level qualifies" in the per-interval depth scans.
inline constexpr int kNoHit = std::numeric_limits<int>::max();

/// Interval indices i with t_i >= from_time and p[i] * p[i+1] <= 0
/// (grid sign change or exact zero).
std::vector<std::int64_t> zero_crossing_intervals(const Path& p,
                                                  double from_time);

/// First time after r at which some level n in [1, max_depth] crosses zero
/// on a grid interval while every lower level stays above the shrinking
/// barrier C * sqrt((1 - t)_+) at both interval endpoints.
///
/// Scans intervals with t_{i+1} > r in increasing order; the hit time is the
/// right endpoint of the first qualifying interval and n_star the smallest
/// qualifying level there. max_depth < 0 means the full stack depth.
/// Requires horizon == 1, 0 < r < 1, C > 0, stack depth >= 1.
TauResult tau_estimate(const PathStack& stack, double r, double C,
                       int max_depth = -1);

/// Smallest qualifying level at interval i (kNoHit if none). Exposed for
/// the scan estimator and oracle tests.
int interval_min_depth(const PathStack& stack, std::int64_t i, double C,
                       int max_depth);

/// For each r in rs: min over intervals with t_{i+1} > r of
/// interval_min_depth, i.e. the smallest stack depth at which tau_{r,C} < 1
/// on this driving path (kNoHit when censored at every depth). One backward
/// sweep shared by all rs.
std::vector<int> tau_min_depths(const PathStack& stack, double C,
                                std::span<const double> rs);

}  // namespace levylab
