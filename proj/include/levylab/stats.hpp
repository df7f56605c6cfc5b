#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace levylab {

/// The universal result cell: Monte Carlo point estimate with its standard
/// error and sample count.
struct EstimateWithCI {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::string label;
};

/// Standard normal CDF.
double normal_cdf(double x);

/// Survival function of the asymptotic Kolmogorov distribution,
/// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2), with the
/// theta-function dual used for small lambda where the series is slow.
double kolmogorov_sf(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// One-sample Kolmogorov-Smirnov test of `samples` against the centered
/// Gaussian law with the given variance; p-value from the asymptotic
/// Kolmogorov distribution at sqrt(n) * D.
KsResult ks_test(std::span<const double> samples, double variance);

}  // namespace levylab
