#include "levylab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace levylab {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double kolmogorov_sf(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Jacobi theta form, fast for small lambda.
    const double f = std::exp(-std::numbers::pi * std::numbers::pi /
                              (8.0 * lambda * lambda));
    const double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda *
                       (f + std::pow(f, 9.0) + std::pow(f, 25.0) +
                        std::pow(f, 49.0));
    return 1.0 - cdf;
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::max(0.0, 2.0 * sum);
}

KsResult ks_test(std::span<const double> samples, double variance) {
  if (samples.empty())
    throw std::invalid_argument("ks_test: samples must be nonempty");
  if (!(variance > 0.0))
    throw std::invalid_argument("ks_test: variance must be > 0");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double scale = 1.0 / std::sqrt(variance);
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf(sorted[i] * scale);
    const double lo = f - static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n - f;
    d = std::max({d, lo, hi});
  }
  return KsResult{d, kolmogorov_sf(std::sqrt(n) * d)};
}

}  // namespace levylab
