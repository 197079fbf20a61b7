#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace csmon {

struct QuantileEstimate {
  double value;
  double std_error;
};

// Upper empirical quantile: order statistic at index ceil(p * n), 1-based.
// The input must be sorted ascending. Throws on an empty sample or p
// outside (0, 1).
double empirical_quantile(std::span<const double> sorted, double p);

// Quantile plus a density-free standard error: half-width of the
// order-statistic bracket at +-sqrt(n p (1-p)) ranks around the quantile
// index (binomial fluctuation of the empirical CDF).
QuantileEstimate empirical_quantile_with_error(std::span<const double> sorted,
                                               double p);

// Two-sample Kolmogorov-Smirnov distance sup_x |F_a(x) - F_b(x)|.
// Takes copies because it sorts.
double two_sample_ks_distance(std::vector<double> a, std::vector<double> b);

// Asymptotic two-sample KS critical value at level alpha:
// k_alpha * sqrt((n1+n2)/(n1*n2)) with k_alpha the Kolmogorov-distribution
// (1-alpha)-quantile.
double ks_two_sample_critical(std::size_t n1, std::size_t n2, double alpha);

inline double binomial_std_error(double rate, std::int64_t n) {
  if (n <= 0) return 0.0;
  const double p = rate < 0.0 ? 0.0 : (rate > 1.0 ? 1.0 : rate);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace csmon
