#pragma once

#include <span>
#include <vector>

#include "levylab/grid.hpp"
#include "levylab/rng.hpp"
#include "levylab/stats.hpp"

namespace levylab {

/// P{ sup_{0<=s<=1} |B_s| > C } by the classical alternating series,
/// truncated once a term drops below 1e-12 in magnitude.
double sup_abs_tail_analytic(double C);

/// E[ sign(B_r) sign(B_1) ] = (2/pi) asin(sqrt(r)) for r in (0, 1].
double sign_cov_closed_form(double r);

/// Monte Carlo series n -> E[h^n_r h^n_1], one entry per order 0..n_max.
/// r is snapped to the nearest interior grid point; "time 1" reads the sign
/// product at the left endpoint of the final interval.
struct CovarianceSeries {
  double r_requested = 0.0;
  double r_snapped = 0.0;
  std::vector<EstimateWithCI> by_order;
};

CovarianceSeries estimate_sign_covariance(double r, int n_max,
                                          std::int64_t paths,
                                          const TimeGrid& grid,
                                          const SeedSpec& seeds,
                                          int workers = 1);

/// One cell of the stopping-time scan: P( tau_{r,C} < 1 at depth N ).
struct TauScanCell {
  double r = 0.0;
  double C = 0.0;
  int N = 0;
  EstimateWithCI estimate;
};

struct TauScan {
  std::vector<TauScanCell> cells;  // ordered by (r, C, N)

  const TauScanCell& cell(double r, double C, int N) const;
};

/// Estimates every (r, C, N) cell on shared driving paths: one stack at
/// max(Ns) per path, so the per-path hit indicator is exactly nondecreasing
/// in N within each (r, C). Binomial standard errors.
TauScan estimate_tau_scan(std::span<const double> rs,
                          std::span<const double> Cs, std::span<const int> Ns,
                          std::int64_t paths, const TimeGrid& grid,
                          const SeedSpec& seeds, int workers = 1);

/// Check of |E[h^n_r h^n_1]| <= P{tau_{r,C} = 1} + P{sup |B| > C} at the
/// largest estimated order, with 3x the summed standard errors as slack.
struct MixingBoundReport {
  double r = 0.0;
  double C = 0.0;
  int N = 0;
  int order = 0;
  double cov_value = 0.0;
  double cov_std_error = 0.0;
  double tau_lt1 = 0.0;
  double tau_std_error = 0.0;
  double sup_tail = 0.0;
  double rhs = 0.0;  // (1 - tau_lt1) + sup_tail + 3*(se_cov + se_tau)
  bool pass = false;
};

MixingBoundReport mixing_bound_check(const CovarianceSeries& cov,
                                     const TauScanCell& tau, double sup_tail);

}  // namespace levylab
