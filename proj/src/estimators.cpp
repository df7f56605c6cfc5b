#include "levylab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "levylab/hitting.hpp"
#include "levylab/parallel.hpp"
#include "levylab/transform.hpp"

namespace levylab {

namespace {

/// Standard error of a mean of +-1 samples whose sum is `signed_sum`.
double pm_one_std_error(std::int64_t signed_sum, std::int64_t n) {
  if (n < 2) return 0.0;
  const double mean = static_cast<double>(signed_sum) / static_cast<double>(n);
  const double var = (static_cast<double>(n) - mean * mean *
                      static_cast<double>(n)) /
                     static_cast<double>(n - 1);
  return std::sqrt(std::max(0.0, var) / static_cast<double>(n));
}

double binomial_std_error(std::int64_t hits, std::int64_t n) {
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

}  // namespace

double sup_abs_tail_analytic(double C) {
  if (!(C > 0.0))
    throw std::invalid_argument("sup_abs_tail_analytic: C must be > 0");
  const double a = std::numbers::pi * std::numbers::pi / (8.0 * C * C);
  double sum = 0.0;
  for (int k = 0;; ++k) {
    const double m = 2.0 * k + 1.0;
    const double term = std::exp(-m * m * a) / m;
    sum += (k % 2 == 0) ? term : -term;
    if (term < 1e-12) break;
  }
  return std::clamp(1.0 - 4.0 / std::numbers::pi * sum, 0.0, 1.0);
}

double sign_cov_closed_form(double r) {
  if (!(r > 0.0 && r <= 1.0))
    throw std::invalid_argument("sign_cov_closed_form: r must be in (0, 1]");
  return 2.0 / std::numbers::pi * std::asin(std::sqrt(r));
}

CovarianceSeries estimate_sign_covariance(double r, int n_max,
                                          std::int64_t paths,
                                          const TimeGrid& grid,
                                          const SeedSpec& seeds, int workers) {
  if (paths < 1)
    throw std::invalid_argument("estimate_sign_covariance: paths must be >= 1");
  if (n_max < 0)
    throw std::invalid_argument("estimate_sign_covariance: n_max must be >= 0");
  if (!(r > 0.0 && r < grid.horizon))
    throw std::invalid_argument(
        "estimate_sign_covariance: r must be in (0, horizon)");

  // Snap r to the nearest grid point, kept interior so both read indices
  // address interval left endpoints.
  std::int64_t snap = std::llround(r / grid.dt);
  snap = std::clamp<std::int64_t>(snap, 1, grid.steps - 1);
  const double r_snapped = grid.time_at(snap);
  const std::int64_t last = grid.steps - 1;

  workers = resolve_workers(workers);
  // sums[w][n] = per-worker sum of the +-1 products at order n (exact).
  std::vector<std::vector<std::int64_t>> sums(
      static_cast<std::size_t>(workers),
      std::vector<std::int64_t>(static_cast<std::size_t>(n_max) + 1, 0));

  parallel_for_paths(
      paths, workers,
      [&](std::int64_t begin, std::int64_t end, int w) {
        std::vector<std::int64_t>& acc = sums[static_cast<std::size_t>(w)];
        Path path;
        PathStack stack;
        for (std::int64_t idx = begin; idx < end; ++idx) {
          sample_path_into(path, grid, seeds,
                           static_cast<std::uint64_t>(idx));
          iterate_transforms_into(stack, path, n_max);
          int prod_r = 1, prod_1 = 1;
          acc[0] += 1;  // h^0 == 1 at both times
          for (int n = 1; n <= n_max; ++n) {
            prod_r *= stack.signs(n - 1, snap);
            prod_1 *= stack.signs(n - 1, last);
            acc[static_cast<std::size_t>(n)] += prod_r * prod_1;
          }
        }
      });

  CovarianceSeries out;
  out.r_requested = r;
  out.r_snapped = r_snapped;
  out.by_order.resize(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    std::int64_t total = 0;
    for (int w = 0; w < workers; ++w)
      total += sums[static_cast<std::size_t>(w)][static_cast<std::size_t>(n)];
    EstimateWithCI& e = out.by_order[static_cast<std::size_t>(n)];
    e.value = static_cast<double>(total) / static_cast<double>(paths);
    e.std_error = pm_one_std_error(total, paths);
    e.n_samples = paths;
    e.label = "cov_hn";
  }
  return out;
}

const TauScanCell& TauScan::cell(double r, double C, int N) const {
  for (const TauScanCell& c : cells)
    if (c.r == r && c.C == C && c.N == N) return c;
  throw std::invalid_argument("TauScan::cell: no such (r, C, N) cell");
}

TauScan estimate_tau_scan(std::span<const double> rs,
                          std::span<const double> Cs, std::span<const int> Ns,
                          std::int64_t paths, const TimeGrid& grid,
                          const SeedSpec& seeds, int workers) {
  if (rs.empty() || Cs.empty() || Ns.empty())
    throw std::invalid_argument(
        "estimate_tau_scan: parameter lists must be nonempty");
  if (paths < 1)
    throw std::invalid_argument("estimate_tau_scan: paths must be >= 1");
  if (grid.horizon != 1.0)
    throw std::invalid_argument("estimate_tau_scan: grid horizon must be 1");
  for (double r : rs)
    if (!(r > 0.0 && r < 1.0))
      throw std::invalid_argument("estimate_tau_scan: every r must be in (0,1)");
  for (double C : Cs)
    if (!(C > 0.0))
      throw std::invalid_argument("estimate_tau_scan: every C must be > 0");
  for (int N : Ns)
    if (N < 1)
      throw std::invalid_argument("estimate_tau_scan: every N must be >= 1");

  const int depth = *std::max_element(Ns.begin(), Ns.end());
  const std::size_t n_r = rs.size(), n_c = Cs.size(), n_n = Ns.size();
  workers = resolve_workers(workers);

  // hit_counts[w][(ir*n_c + ic)*n_n + in], exact integers.
  std::vector<std::vector<std::int64_t>> hit_counts(
      static_cast<std::size_t>(workers),
      std::vector<std::int64_t>(n_r * n_c * n_n, 0));

  parallel_for_paths(paths, workers, [&](std::int64_t begin, std::int64_t end,
                                         int w) {
    std::vector<std::int64_t>& counts = hit_counts[static_cast<std::size_t>(w)];
    Path path;
    PathStack stack;
    for (std::int64_t idx = begin; idx < end; ++idx) {
      sample_path_into(path, grid, seeds, static_cast<std::uint64_t>(idx));
      iterate_transforms_into(stack, path, depth);
      for (std::size_t ic = 0; ic < n_c; ++ic) {
        const std::vector<int> min_depths = tau_min_depths(stack, Cs[ic], rs);
        for (std::size_t ir = 0; ir < n_r; ++ir)
          for (std::size_t in = 0; in < n_n; ++in)
            if (min_depths[ir] <= Ns[in])
              ++counts[(ir * n_c + ic) * n_n + in];
      }
    }
  });

  TauScan out;
  out.cells.reserve(n_r * n_c * n_n);
  for (std::size_t ir = 0; ir < n_r; ++ir)
    for (std::size_t ic = 0; ic < n_c; ++ic)
      for (std::size_t in = 0; in < n_n; ++in) {
        std::int64_t total = 0;
        for (int w = 0; w < workers; ++w)
          total += hit_counts[static_cast<std::size_t>(w)]
                             [(ir * n_c + ic) * n_n + in];
        TauScanCell cell;
        cell.r = rs[ir];
        cell.C = Cs[ic];
        cell.N = Ns[in];
        cell.estimate.value =
            static_cast<double>(total) / static_cast<double>(paths);
        cell.estimate.std_error = binomial_std_error(total, paths);
        cell.estimate.n_samples = paths;
        cell.estimate.label = "tau_lt_1";
        out.cells.push_back(std::move(cell));
      }
  return out;
}

MixingBoundReport mixing_bound_check(const CovarianceSeries& cov,
                                     const TauScanCell& tau, double sup_tail) {
  if (cov.by_order.empty())
    throw std::invalid_argument("mixing_bound_check: empty covariance series");
  if (cov.r_requested != tau.r)
    throw std::invalid_argument(
        "mixing_bound_check: covariance r and tau cell r differ");

  const int order = static_cast<int>(cov.by_order.size()) - 1;
  const EstimateWithCI& c = cov.by_order.back();
  MixingBoundReport rep;
  rep.r = tau.r;
  rep.C = tau.C;
  rep.N = tau.N;
  rep.order = order;
  rep.cov_value = c.value;
  rep.cov_std_error = c.std_error;
  rep.tau_lt1 = tau.estimate.value;
  rep.tau_std_error = tau.estimate.std_error;
  rep.sup_tail = sup_tail;
  rep.rhs = (1.0 - rep.tau_lt1) + sup_tail +
            3.0 * (rep.cov_std_error + rep.tau_std_error);
  rep.pass = std::abs(rep.cov_value) <= rep.rhs;
  return rep;
}

}  // namespace levylab
