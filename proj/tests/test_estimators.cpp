#include <stdexcept>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"

#include "csmon/estimators.hpp"
#include "csmon/rng.hpp"

using namespace csmon;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Two-pass textbook oracle.
struct TwoPass {
  double mean = 0.0;
  double m2 = 0.0;
};

TwoPass two_pass(const std::vector<double>& xs) {
  TwoPass r;
  for (const double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  for (const double x : xs) r.m2 += (x - r.mean) * (x - r.mean);
  return r;
}

double two_pass_autocov(const std::vector<double>& xs, int lag) {
  const double mean = two_pass(xs).mean;
  double acc = 0.0;
  for (std::size_t i = 0; i + lag < xs.size(); ++i)
    acc += (xs[i] - mean) * (xs[i + static_cast<std::size_t>(lag)] - mean);
  return acc / static_cast<double>(xs.size());
}

}  // namespace

TEST_CASE("hand-computable moments") {
  StreamState s(10);
  s.update(1.0);
  s.update(2.0);
  s.update(3.0);
  CHECK(s.count() == 3);
  CHECK(s.mean() == 2.0);
  CHECK(s.variance() == 1.0);
  CHECK(s.stddev() == 1.0);
}

TEST_CASE("constant streams never reach a positive variance") {
  StreamState s(10);
  for (int i = 0; i < 1000000; ++i) s.update(5.0);
  CHECK(s.mean() == 5.0);
  CHECK(s.variance() == 0.0);
  CHECK(s.stddev() == kInf);
}

TEST_CASE("gaussian stream variance is close to 1") {
  CounterRng rng(31, 0);
  StreamState s(10);
  for (int i = 0; i < 100000; ++i) s.update(rng.next_gaussian());
  CHECK(s.variance() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("one-pass moments match the two-pass oracle") {
  CounterRng rng(8, 0);
  for (int rep = 0; rep < 10000; ++rep) {
    const int n = 2 + static_cast<int>(rng.next_uniform() * 998);
    const double scale = std::exp(6.0 * (rng.next_uniform() - 0.5));
    const double shift = 100.0 * (rng.next_uniform() - 0.5);
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (auto& x : xs) x = shift + scale * rng.next_gaussian();
    StreamState s(1);
    for (const double x : xs) s.update(x);
    const TwoPass oracle = two_pass(xs);
    CHECK(s.mean() ==
          doctest::Approx(oracle.mean).epsilon(1e-10).scale(std::fabs(shift) +
                                                            scale));
    CHECK(s.m2() == doctest::Approx(oracle.m2).epsilon(1e-10).scale(
                        scale * scale * n));
  }
}

TEST_CASE("non-finite observations are rejected without mutating state") {
  StreamState s(10);
  s.update(1.0);
  s.update(2.0);
  CHECK_THROWS_AS(s.update(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(s.update(kInf), std::invalid_argument);
  CHECK(s.count() == 2);
  CHECK(s.mean() == 1.5);
}

TEST_CASE("positivity guard: +inf until the first positive estimate") {
  StreamState s(10);
  s.update(7.0);
  CHECK(s.stddev() == kInf);  // t = 1
  s.update(7.0);
  CHECK(s.stddev() == kInf);  // two equal values, m2 = 0
  s.update(7.0);
  CHECK(s.stddev() == kInf);
  s.update(9.0);
  CHECK(s.stddev() < kInf);  // first distinct value
  for (int i = 0; i < 100; ++i) {
    s.update(7.0);
    CHECK(s.stddev() < kInf);  // finite thereafter
  }
}

TEST_CASE("guard transition happens exactly at the second distinct value") {
  CounterRng rng(12, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const int flip = 2 + static_cast<int>(rng.next_uniform() * 20);
    StreamState s(1);
    for (int t = 1; t <= 40; ++t) {
      s.update(t < flip ? 3.0 : 4.0);
      CHECK((s.stddev() < kInf) == (t >= flip));
    }
  }
}

TEST_CASE("bartlett with fixed bandwidth 0 equals the plug-in variance") {
  CounterRng rng(3, 0);
  StreamState plain(1);
  StreamState bart(1, 1, VarianceMethod::BartlettLongRun,
                   BartlettOptions{.fixed_bandwidth = 0});
  for (int i = 0; i < 500; ++i) {
    const double x = rng.next_gaussian();
    plain.update(x);
    bart.update(x);
    if (plain.count() >= 2)
      CHECK(bart.variance() == plain.m2() / static_cast<double>(plain.count()));
  }
}

TEST_CASE("bandwidth follows floor(t^(1/3)) with caps") {
  StreamState s(1, 1, VarianceMethod::BartlettLongRun);
  auto feed = [&](int upto) {
    while (s.count() < upto) s.update(static_cast<double>(s.count() % 3));
  };
  feed(7);
  CHECK(s.bandwidth() == 1);
  feed(8);
  CHECK(s.bandwidth() == 2);
  feed(26);
  CHECK(s.bandwidth() == 2);
  feed(27);
  CHECK(s.bandwidth() == 3);
  feed(1000);
  CHECK(s.bandwidth() == 10);

  StreamState capped(1, 1, VarianceMethod::BartlettLongRun,
                     BartlettOptions{.max_bandwidth = 4});
  for (int i = 0; i < 1000; ++i) capped.update(static_cast<double>(i % 5));
  CHECK(capped.bandwidth() == 4);
}

TEST_CASE("incremental autocovariances match the two-pass oracle") {
  CounterRng rng(17, 0);
  std::vector<double> xs(300);
  double prev = 0.0;
  for (auto& x : xs) {
    prev = 0.6 * prev + rng.next_gaussian();
    x = prev + 2.0;
  }
  StreamState s(1, 1, VarianceMethod::BartlettLongRun,
                BartlettOptions{.max_bandwidth = 12});
  for (const double x : xs) s.update(x);
  for (int lag = 0; lag <= 12; ++lag)
    CHECK(s.autocovariance(lag) ==
          doctest::Approx(two_pass_autocov(xs, lag)).epsilon(1e-10));
}

TEST_CASE("bartlett long-run variance on AR(1) data") {
  // x_i = 0.5 x_{i-1} + e_i has long-run variance 1/(1-0.5)^2 = 4.
  CounterRng rng(41, 0);
  StreamState s(1, 1, VarianceMethod::BartlettLongRun);
  double y = rng.next_gaussian() / std::sqrt(0.75);
  s.update(y);
  for (int i = 1; i < 100000; ++i) {
    y = 0.5 * y + rng.next_gaussian();
    s.update(y);
  }
  CHECK(s.variance() == doctest::Approx(4.0).epsilon(0.15));
  CHECK(s.bandwidth() == 46);
}

TEST_CASE("bartlett guard waits until t exceeds the bandwidth") {
  StreamState s(1, 1, VarianceMethod::BartlettLongRun,
                BartlettOptions{.fixed_bandwidth = 2});
  s.update(0.0);
  s.update(1.0);
  s.update(0.0);
  CHECK(s.stddev() == kInf);  // t = 3 = H+1
  s.update(1.0);
  CHECK(s.variance() < kInf);
}

TEST_CASE("from_moments resumes a stream") {
  const auto s = StreamState::from_moments(100, 1, 100, 2.5, 99.0);
  CHECK(s.count() == 100);
  CHECK(s.mean() == 2.5);
  CHECK(s.stddev() == 1.0);
  CHECK_THROWS_AS(StreamState::from_moments(100, 1, 2, 0.0, -1.0),
                  std::invalid_argument);
}

TEST_CASE("suppression presets") {
  CHECK(suppress_horizon_preset("1", 100) == 1);
  CHECK(suppress_horizon_preset("0", 100) == 0);
  CHECK(suppress_horizon_preset("log", 200) == 6);    // ceil(5.298)
  CHECK(suppress_horizon_preset("sqrt", 200) == 15);  // ceil(14.14)
  CHECK(suppress_horizon_preset("17", 100) == 17);
  CHECK_THROWS_AS(suppress_horizon_preset("nope", 100), std::invalid_argument);
  CHECK_THROWS_AS(suppress_horizon_preset("-3", 100), std::invalid_argument);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(StreamState(0), std::invalid_argument);
  CHECK_THROWS_AS(StreamState(10, -1), std::invalid_argument);
  CHECK_THROWS_AS(StreamState(10, 1, VarianceMethod::BartlettLongRun,
                              BartlettOptions{.fixed_bandwidth = 99,
                                              .max_bandwidth = 10}),
                  std::invalid_argument);
}
