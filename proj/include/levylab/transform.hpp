#pragma once

#include <cstdint>
#include <vector>

#include "levylab/grid.hpp"

namespace levylab {

/// Sign convention used everywhere: +1 for x > 0, -1 for x <= 0.
/// Zero maps to -1 (left-continuous convention); this is the single
/// seam to change for sensitivity runs.
inline int sign_conv(double x) { return x > 0.0 ? 1 : -1; }

using SignMatrix =
    Eigen::Array<std::int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// The iterated transform of one driving path.
///
/// Level 0 is the base path; level n+1 has increments
/// signs(n, i) * (increments of level n), where signs(n, i) is the sign of
/// level n at the left endpoint t_i. Increments are propagated exactly
/// (a sign flip is exact in IEEE arithmetic), so level n's increments equal
/// h^n * (base increments) bit for bit, and all levels share the base
/// path's quadratic variation exactly.
struct PathStack {
  Path base;
  Eigen::ArrayXd base_increments;        // steps
  std::vector<Eigen::ArrayXd> iterates;  // levels 1..depth, each steps + 1
  SignMatrix signs;                      // depth x steps; row n = sign of level n

  int depth() const { return static_cast<int>(iterates.size()); }

  /// Values of level n (0 = base).
  const Eigen::ArrayXd& level_values(int n) const {
    return n == 0 ? base.values : iterates[static_cast<std::size_t>(n) - 1];
  }
};

/// Left-point (Ito) discretization of the transform:
/// o[0] = 0, o[i+1] = o[i] + sign_conv(p[i]) * (p[i+1] - p[i]).
Path levy_transform_integral(const Path& p);

/// Builds levels 1..depth above p, recording the sign rows used.
PathStack iterate_transforms(const Path& p, int depth);

/// Same, reusing out's storage (no reallocation when shapes match).
void iterate_transforms_into(PathStack& out, const Path& p, int depth);

/// h^n on interval left endpoints: h[i] = prod_{k<n} signs(k, i).
/// Order 0 is the empty product (all +1).
struct SignSeries {
  TimeGrid grid;
  Eigen::Array<std::int8_t, Eigen::Dynamic, 1> h;  // steps
  int order = 0;
};

SignSeries sign_product(const PathStack& stack, int n);

/// Occupation-time estimate of local time at level zero:
/// L[j] = dt/(2 eps) * #{i < j : |p[i]| <= eps}. Nondecreasing, L[0] = 0.
struct LocalTimeSeries {
  TimeGrid grid;
  Eigen::ArrayXd L;  // steps + 1
  double eps = 0.0;
};

LocalTimeSeries local_time_occupation(const Path& p, double eps);

/// Tanaka form of the transform: o[i] = |p[i]| - L[i]. Diagnostic only;
/// downstream statistics use the integral form, which is exact at grid level.
Path levy_transform_tanaka(const Path& p, double eps);

}  // namespace levylab
