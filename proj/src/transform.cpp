#include "levylab/transform.hpp"

#include <cmath>
#include <stdexcept>

namespace levylab {

Path levy_transform_integral(const Path& p) {
  check_path(p);
  const std::int64_t steps = p.grid.steps;
  Path out{p.grid, Eigen::ArrayXd(steps + 1)};
  out.values[0] = 0.0;
  double acc = 0.0;
  for (std::int64_t i = 0; i < steps; ++i) {
    const double d = p.values[i + 1] - p.values[i];
    acc += sign_conv(p.values[i]) > 0 ? d : -d;
    out.values[i + 1] = acc;
  }
  return out;
}

void iterate_transforms_into(PathStack& out, const Path& p, int depth) {
  check_path(p);
  if (depth < 0) throw std::invalid_argument("iterate_transforms: depth < 0");
  const std::int64_t steps = p.grid.steps;

  out.base = p;
  out.base_increments =
      p.values.tail(steps) - p.values.head(steps);
  out.signs.resize(depth, steps);
  out.iterates.resize(static_cast<std::size_t>(depth));

  // Rolling exact increments of the current level; each level flips signs
  // in place, so level n's increments stay equal to h^n * base_increments
  // bit for bit.
  Eigen::ArrayXd incr = out.base_increments;
  const Eigen::ArrayXd* prev = &p.values;
  for (int n = 0; n < depth; ++n) {
    Eigen::ArrayXd& next = out.iterates[static_cast<std::size_t>(n)];
    next.resize(steps + 1);
    std::int8_t* sign_row = out.signs.data() +
                            static_cast<std::ptrdiff_t>(n) * steps;
    const double* pv = prev->data();
    double acc = 0.0;
    next[0] = 0.0;
    for (std::int64_t i = 0; i < steps; ++i) {
      const std::int8_t s = pv[i] > 0.0 ? std::int8_t{1} : std::int8_t{-1};
      sign_row[i] = s;
      const double d = s > 0 ? incr[i] : -incr[i];
      incr[i] = d;
      acc += d;
      next[i + 1] = acc;
    }
    prev = &next;
  }
}

PathStack iterate_transforms(const Path& p, int depth) {
  PathStack out;
  iterate_transforms_into(out, p, depth);
  return out;
}

SignSeries sign_product(const PathStack& stack, int n) {
  if (n < 0 || n > stack.depth())
    throw std::invalid_argument("sign_product: order must be in [0, depth]");
  const std::int64_t steps = stack.base.grid.steps;
  SignSeries out{stack.base.grid,
                 Eigen::Array<std::int8_t, Eigen::Dynamic, 1>(steps), n};
  out.h.setConstant(1);
  for (int k = 0; k < n; ++k)
    out.h *= stack.signs.row(k).transpose();
  return out;
}

LocalTimeSeries local_time_occupation(const Path& p, double eps) {
  check_path(p);
  if (!(eps > 0.0))
    throw std::invalid_argument("local_time_occupation: eps must be > 0");
  const std::int64_t steps = p.grid.steps;
  LocalTimeSeries out{p.grid, Eigen::ArrayXd(steps + 1), eps};
  const double weight = p.grid.dt / (2.0 * eps);
  double acc = 0.0;
  out.L[0] = 0.0;
  for (std::int64_t i = 0; i < steps; ++i) {
    if (std::abs(p.values[i]) <= eps) acc += weight;
    out.L[i + 1] = acc;
  }
  return out;
}

Path levy_transform_tanaka(const Path& p, double eps) {
  const LocalTimeSeries lt = local_time_occupation(p, eps);
  Path out{p.grid, p.values.abs() - lt.L};
  return out;
}

}  // namespace levylab
