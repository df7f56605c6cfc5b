#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

namespace levylab {

/// Uniform partition of [0, horizon] into `steps` intervals of width dt.
struct TimeGrid {
  double horizon = 1.0;
  std::int64_t steps = 1;
  double dt = 1.0;

  double time_at(std::int64_t i) const { return static_cast<double>(i) * dt; }
};

inline TimeGrid make_grid(double horizon, std::int64_t steps) {
  if (!(horizon > 0.0))
    throw std::invalid_argument("make_grid: horizon must be positive");
  if (steps < 1)
    throw std::invalid_argument("make_grid: steps must be >= 1");
  return TimeGrid{horizon, steps, horizon / static_cast<double>(steps)};
}

/// One discretized scalar path on a grid; values[i] is the value at t_i.
struct Path {
  TimeGrid grid;
  Eigen::ArrayXd values;  // size steps + 1
};

inline void check_path(const Path& p) {
  if (p.values.size() != p.grid.steps + 1)
    throw std::invalid_argument("Path: values.size() must equal steps + 1");
}

}  // namespace levylab
