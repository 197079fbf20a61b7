#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "csmon/quantiles.hpp"
#include "csmon/rng.hpp"
#include "csmon/stats.hpp"

using namespace csmon;

TEST_CASE("empirical quantile is the upper order statistic") {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(empirical_quantile(v, 0.5) == 5.0);    // ceil(5) = rank 5
  CHECK(empirical_quantile(v, 0.95) == 10.0);  // ceil(9.5) = rank 10
  CHECK(empirical_quantile(v, 0.9) == 9.0);    // ceil(9) = rank 9
  CHECK(empirical_quantile(v, 0.901) == 10.0);
  CHECK(empirical_quantile(v, 0.05) == 1.0);
}

TEST_CASE("quantile input validation") {
  const std::vector<double> empty;
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(empirical_quantile(empty, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(empirical_quantile(one, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(empirical_quantile(one, 1.0), std::invalid_argument);
  CHECK(empirical_quantile(one, 0.99) == 1.0);
}

TEST_CASE("order-statistic bracket gives a positive spread on noisy data") {
  CounterRng rng(5, 1);
  std::vector<double> v(20000);
  for (auto& x : v) x = rng.next_gaussian();
  std::sort(v.begin(), v.end());
  const auto est = empirical_quantile_with_error(v, 0.95);
  CHECK(est.value == doctest::Approx(1.6449).epsilon(0.03));
  CHECK(est.std_error > 0.0);
  CHECK(est.std_error < 0.05);
}

namespace {

// Brute-force KS oracle: evaluate both empirical CDFs at every pooled point.
double ks_brute_force(const std::vector<double>& a,
                      const std::vector<double>& b) {
  std::vector<double> pool = a;
  pool.insert(pool.end(), b.begin(), b.end());
  double best = 0.0;
  for (const double x : pool) {
    const auto fa =
        static_cast<double>(std::count_if(a.begin(), a.end(),
                                          [&](double v) { return v <= x; })) /
        static_cast<double>(a.size());
    const auto fb =
        static_cast<double>(std::count_if(b.begin(), b.end(),
                                          [&](double v) { return v <= x; })) /
        static_cast<double>(b.size());
    best = std::max(best, std::fabs(fa - fb));
  }
  return best;
}

}  // namespace

TEST_CASE("two-sample KS distance agrees with the brute-force oracle") {
  CHECK(two_sample_ks_distance({1, 2}, {1.5}) == doctest::Approx(0.5));
  CHECK(two_sample_ks_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(two_sample_ks_distance({1, 2}, {5, 6}) == 1.0);

  CounterRng rng(11, 0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> a(1 + static_cast<int>(rng.next_uniform() * 40));
    std::vector<double> b(1 + static_cast<int>(rng.next_uniform() * 40));
    for (auto& x : a) x = std::floor(rng.next_gaussian() * 4.0) / 4.0;
    for (auto& x : b) x = std::floor((rng.next_gaussian() + 0.3) * 4.0) / 4.0;
    CHECK(two_sample_ks_distance(a, b) ==
          doctest::Approx(ks_brute_force(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("kolmogorov series quantiles match the analytic oracle") {
  // Two-sided points of the Kolmogorov distribution, from the series
  // 1 - 2 sum (-1)^(k+1) exp(-2 k^2 x^2); one-sided from 1 - exp(-2 x^2).
  CHECK(kolmogorov_series_quantile(0.05, Sided::TwoSided) ==
        doctest::Approx(1.35810).epsilon(1e-4));
  CHECK(kolmogorov_series_quantile(0.01, Sided::TwoSided) ==
        doctest::Approx(1.62762).epsilon(1e-4));
  CHECK(kolmogorov_series_quantile(0.10, Sided::TwoSided) ==
        doctest::Approx(1.22385).epsilon(1e-4));
  CHECK(kolmogorov_series_quantile(0.05, Sided::OneSided) ==
        doctest::Approx(1.2238734).epsilon(1e-6));
  CHECK(kolmogorov_series_quantile(0.5, Sided::OneSided) ==
        doctest::Approx(0.5887050).epsilon(1e-6));
  // Round trip through the CDF.
  for (const double alpha : {0.01, 0.05, 0.25, 0.5, 0.9}) {
    const double q = kolmogorov_series_quantile(alpha, Sided::TwoSided);
    CHECK(kolmogorov_series_cdf(q) == doctest::Approx(1 - alpha).epsilon(1e-6));
  }
  CHECK_THROWS_AS(kolmogorov_series_quantile(0.0, Sided::TwoSided),
                  std::invalid_argument);
  CHECK_THROWS_AS(kolmogorov_series_quantile(1.0, Sided::OneSided),
                  std::invalid_argument);
}

TEST_CASE("two-sample KS critical value") {
  CHECK(ks_two_sample_critical(100000, 100000, 0.01) ==
        doctest::Approx(0.0072790).epsilon(1e-4));
  CHECK(ks_two_sample_critical(2000, 100000, 0.01) ==
        doctest::Approx(1.62762 * std::sqrt(102000.0 / 2.0e8)).epsilon(1e-4));
}

TEST_CASE("binomial standard error") {
  CHECK(binomial_std_error(0.5, 100) == doctest::Approx(0.05));
  CHECK(binomial_std_error(0.0, 100) == 0.0);
  CHECK(binomial_std_error(1.0, 100) == 0.0);
  CHECK(binomial_std_error(0.5, 0) == 0.0);
}
