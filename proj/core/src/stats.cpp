#include "csmon/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "csmon/quantiles.hpp"

namespace csmon {

namespace {

std::size_t order_index(std::size_t n, double p) {
  // ceil(p*n) as a 1-based rank, clamped to [1, n].
  const double raw = std::ceil(p * static_cast<double>(n));
  auto rank = static_cast<std::size_t>(raw);
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  return rank;
}

}  // namespace

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("quantile level must be in (0,1)");
  return sorted[order_index(sorted.size(), p) - 1];
}

QuantileEstimate empirical_quantile_with_error(std::span<const double> sorted,
                                               double p) {
  const double value = empirical_quantile(sorted, p);
  const std::size_t n = sorted.size();
  const std::size_t rank = order_index(n, p);
  const double spread = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
  auto delta = static_cast<std::size_t>(std::llround(spread));
  if (delta < 1) delta = 1;
  const std::size_t lo = rank > delta + 1 ? rank - delta - 1 : 0;
  std::size_t hi = rank - 1 + delta;
  if (hi > n - 1) hi = n - 1;
  return {value, 0.5 * (sorted[hi] - sorted[lo])};
}

double two_sample_ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("KS distance needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0;
  std::size_t ib = 0;
  double diff = 0.0;
  double best = 0.0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] < b[ib]) {
      diff += 1.0 / na;
      ++ia;
    } else if (b[ib] < a[ia]) {
      diff -= 1.0 / nb;
      ++ib;
    } else {
      const double x = a[ia];
      while (ia < a.size() && a[ia] == x) {
        diff += 1.0 / na;
        ++ia;
      }
      while (ib < b.size() && b[ib] == x) {
        diff -= 1.0 / nb;
        ++ib;
      }
    }
    best = std::max(best, std::fabs(diff));
  }
  return best;
}

double ks_two_sample_critical(std::size_t n1, std::size_t n2, double alpha) {
  if (n1 == 0 || n2 == 0)
    throw std::invalid_argument("KS critical value needs positive sizes");
  const double k = kolmogorov_series_quantile(alpha, Sided::TwoSided);
  const double n1d = static_cast<double>(n1);
  const double n2d = static_cast<double>(n2);
  return k * std::sqrt((n1d + n2d) / (n1d * n2d));
}

}  // namespace csmon
