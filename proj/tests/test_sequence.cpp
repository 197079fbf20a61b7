#include <stdexcept>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"

#include "csmon/boundary.hpp"
#include "csmon/estimators.hpp"
#include "csmon/rng.hpp"
#include "csmon/sequence.hpp"

using namespace csmon;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CriticalValue make_cv(double value, Sided sided) {
  CriticalValue cv;
  cv.shape_key = "canonical:g1=0,g2=0";
  cv.alpha = 0.05;
  cv.sided = sided;
  cv.value = value;
  cv.mc_paths = 1;
  cv.grid_n = 1;
  cv.seed = 0;
  return cv;
}

const BoundaryShape kFlat = BoundaryShape::canonical(0.0, 0.0);
const CriticalValue kTwo = make_cv(1.3581, Sided::TwoSided);
const CriticalValue kOne = make_cv(1.2239, Sided::OneSided);

}  // namespace

TEST_CASE("first observation yields the whole line") {
  StreamState s(100);
  s.update(3.0);
  const auto rec = interval(s, kFlat, kTwo);
  CHECK(rec.lower == -kInf);
  CHECK(rec.upper == kInf);
  CHECK(rec.whole_line());
  CHECK(rec.contains(-1e300));
  CHECK(rec.contains(1e300));
}

TEST_CASE("half-width composes sigma, c and the boundary width") {
  // m = 100, t = 100, sigma = 1: width 0.2, so half-width = 1.3581 * 0.2.
  const auto s = StreamState::from_moments(100, 1, 100, 0.0, 99.0);
  const auto rec = interval(s, kFlat, kTwo);
  CHECK(rec.sigma == 1.0);
  CHECK(rec.half_width == doctest::Approx(0.27162).epsilon(1e-12));
  CHECK(rec.lower == doctest::Approx(-0.27162).epsilon(1e-12));
  CHECK(rec.upper == doctest::Approx(0.27162).epsilon(1e-12));
}

TEST_CASE("constant stream reports the whole line forever") {
  StreamState s(10);
  for (int i = 0; i < 1000; ++i) {
    s.update(42.0);
    const auto rec = interval(s, kFlat, kTwo);
    CHECK(rec.whole_line());
  }
}

TEST_CASE("suppressed times report the whole line") {
  StreamState s(100, /*suppress_horizon=*/5);
  CounterRng rng(1, 0);
  for (int t = 1; t <= 12; ++t) {
    s.update(rng.next_gaussian());
    const auto rec = interval(s, kFlat, kTwo);
    if (t <= 5)
      CHECK(rec.whole_line());
    else
      CHECK_FALSE(rec.whole_line());
  }
}

TEST_CASE("sidedness of the critical value is enforced") {
  const auto s = StreamState::from_moments(100, 1, 100, 0.0, 99.0);
  CHECK_THROWS_AS(interval(s, kFlat, kOne), std::invalid_argument);
  CHECK_THROWS_AS(test_two_sided(s, kFlat, kOne, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(test_one_sided(s, kFlat, kTwo, 0.0, Direction::Right),
                  std::invalid_argument);
  CHECK_THROWS_AS(test_one_sided(s, kFlat, kOne, 0.0, Direction::TwoSided),
                  std::invalid_argument);
}

TEST_CASE("no rejection at the sample mean; ties reject") {
  const auto s = StreamState::from_moments(100, 1, 100, 1.5, 99.0);
  CHECK_FALSE(test_two_sided(s, kFlat, kTwo, s.mean()).reject);
  const auto rec = interval(s, kFlat, kTwo);
  CHECK(test_two_sided(s, kFlat, kTwo, rec.upper).reject);
  CHECK(test_two_sided(s, kFlat, kTwo, rec.lower).reject);
}

TEST_CASE("exact duality between the test and the open interval") {
  CounterRng rng(21, 0);
  int checked = 0;
  for (int rep = 0; rep < 2000; ++rep) {
    StreamState s(1 + static_cast<int>(rng.next_uniform() * 200));
    const int n = 1 + static_cast<int>(rng.next_uniform() * 50);
    for (int i = 0; i < n; ++i) s.update(rng.next_gaussian());
    const auto rec = interval(s, kFlat, kTwo);
    std::vector<double> mu0s = {
        s.mean(),
        s.mean() + 10.0 * (rng.next_uniform() - 0.5),
        rng.next_gaussian() * 100.0,
        rec.lower,
        rec.upper,
    };
    for (const double mu0 : mu0s) {
      if (std::isnan(mu0)) continue;
      const auto verdict = test_two_sided(s, kFlat, kTwo, mu0);
      CHECK(verdict.reject == !rec.contains(mu0));
      // Away from exact ties the textbook comparison agrees too.
      if (std::isfinite(rec.half_width) && mu0 != rec.lower &&
          mu0 != rec.upper)
        CHECK(verdict.reject ==
              (std::fabs(s.mean() - mu0) >= rec.half_width));
      ++checked;
    }
  }
  CHECK(checked >= 10000);
}

TEST_CASE("one-sided right never rejects means above the data") {
  StreamState s(50);
  CounterRng rng(4, 0);
  for (int i = 0; i < 500; ++i) {
    s.update(rng.next_gaussian());
    CHECK_FALSE(test_one_sided(s, kFlat, kOne, 50.0, Direction::Right).reject);
  }
}

TEST_CASE("one-sided rejection is monotone in the tested mean") {
  CounterRng rng(9, 0);
  for (int rep = 0; rep < 300; ++rep) {
    StreamState s(20);
    for (int i = 0; i < 30; ++i) s.update(rng.next_gaussian() + 1.0);
    bool prev_reject = true;
    for (double mu0 = -3.0; mu0 <= 3.0; mu0 += 0.25) {
      const bool reject =
          test_one_sided(s, kFlat, kOne, mu0, Direction::Right).reject;
      if (!prev_reject) CHECK_FALSE(reject);
      prev_reject = reject;
    }
  }
}

TEST_CASE("negating data and mean swaps left and right verdicts exactly") {
  CounterRng rng(33, 0);
  for (int rep = 0; rep < 200; ++rep) {
    StreamState pos(10), neg(10);
    const int n = 2 + static_cast<int>(rng.next_uniform() * 40);
    for (int i = 0; i < n; ++i) {
      const double x = 3.0 * rng.next_gaussian() + 0.5;
      pos.update(x);
      neg.update(-x);
    }
    for (double mu0 : {-2.0, -0.1, 0.0, 0.4, 1.7}) {
      CHECK(test_one_sided(pos, kFlat, kOne, mu0, Direction::Right).reject ==
            test_one_sided(neg, kFlat, kOne, -mu0, Direction::Left).reject);
      CHECK(test_one_sided(pos, kFlat, kOne, mu0, Direction::Left).reject ==
            test_one_sided(neg, kFlat, kOne, -mu0, Direction::Right).reject);
    }
  }
}

TEST_CASE("a singleton battery reduces to the one-sided test") {
  StreamState s(20);
  CounterRng rng(2, 0);
  for (int i = 0; i < 25; ++i) s.update(rng.next_gaussian() + 2.0);
  const double mu0 = 0.0;
  const auto single = hierarchical_battery(s, kFlat, kOne, {{mu0}},
                                           BatteryMode::RightOnly);
  REQUIRE(single.size() == 1);
  CHECK(single[0].reject ==
        test_one_sided(s, kFlat, kOne, mu0, Direction::Right).reject);
}

TEST_CASE("battery rejections form a prefix (right) and suffix (left)") {
  CounterRng rng(14, 0);
  for (int rep = 0; rep < 300; ++rep) {
    StreamState s(30);
    const int n = 2 + static_cast<int>(rng.next_uniform() * 60);
    for (int i = 0; i < n; ++i) s.update(2.0 * rng.next_gaussian());
    std::vector<double> mus;
    double mu = -2.5;
    for (int i = 0; i < 12; ++i) {
      mus.push_back(mu);
      mu += 0.1 + rng.next_uniform();
    }
    const auto right =
        hierarchical_battery(s, kFlat, kOne, mus, BatteryMode::RightOnly);
    bool seen_accept = false;
    for (const auto& v : right) {
      if (!v.reject) seen_accept = true;
      if (seen_accept) CHECK_FALSE(v.reject);
    }
    const auto left =
        hierarchical_battery(s, kFlat, kOne, mus, BatteryMode::LeftOnly);
    bool seen_reject = false;
    for (const auto& v : left) {
      if (v.reject) seen_reject = true;
      if (seen_reject) CHECK(v.reject);
    }
  }
}

TEST_CASE("both-mode battery is consistent with the two-sided test") {
  CounterRng rng(15, 0);
  for (int rep = 0; rep < 200; ++rep) {
    StreamState s(30);
    for (int i = 0; i < 40; ++i) s.update(rng.next_gaussian());
    const std::vector<double> mus = {-1.0, -0.3, 0.0, 0.2, 0.9};
    const auto verdicts =
        hierarchical_battery(s, kFlat, kTwo, mus, BatteryMode::Both);
    REQUIRE(verdicts.size() == 2 * mus.size());
    for (std::size_t j = 0; j < mus.size(); ++j) {
      const bool either =
          verdicts[2 * j].reject || verdicts[2 * j + 1].reject;
      CHECK(either == test_two_sided(s, kFlat, kTwo, mus[j]).reject);
    }
  }
}

TEST_CASE("battery input validation") {
  const auto s = StreamState::from_moments(10, 1, 10, 0.0, 9.0);
  CHECK_THROWS_AS(
      hierarchical_battery(s, kFlat, kOne, {{1.0, 1.0}},
                           BatteryMode::RightOnly),
      std::invalid_argument);
  CHECK_THROWS_AS(
      hierarchical_battery(s, kFlat, kOne, {{2.0, 1.0}},
                           BatteryMode::RightOnly),
      std::invalid_argument);
  CHECK_THROWS_AS(
      hierarchical_battery(s, kFlat, kTwo, {{0.0}}, BatteryMode::RightOnly),
      std::invalid_argument);
  CHECK_THROWS_AS(
      hierarchical_battery(s, kFlat, kOne, {{0.0}}, BatteryMode::Both),
      std::invalid_argument);
  CHECK(hierarchical_battery(s, kFlat, kOne, {}, BatteryMode::RightOnly)
            .empty());
}

TEST_CASE("scaling the stream by a power of two scales the interval exactly") {
  CounterRng rng(6, 0);
  for (const double lambda : {0.5, 2.0, 4.0}) {
    StreamState base(50), scaled(50);
    for (int i = 0; i < 200; ++i) {
      const double x = rng.next_gaussian() + 0.25;
      base.update(x);
      scaled.update(lambda * x);
    }
    const auto rb = interval(base, kFlat, kTwo);
    const auto rs = interval(scaled, kFlat, kTwo);
    CHECK(rs.lower == lambda * rb.lower);
    CHECK(rs.upper == lambda * rb.upper);
  }
}

TEST_CASE("general affine maps move the interval to near round-off") {
  CounterRng rng(26, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const double lambda = 0.1 + 5.0 * rng.next_uniform();
    const double delta = 10.0 * (rng.next_uniform() - 0.5);
    StreamState base(25), mapped(25);
    for (int i = 0; i < 100; ++i) {
      const double x = rng.next_gaussian();
      base.update(x);
      mapped.update(lambda * x + delta);
    }
    const auto rb = interval(base, kFlat, kTwo);
    const auto rm = interval(mapped, kFlat, kTwo);
    CHECK(rm.lower ==
          doctest::Approx(lambda * rb.lower + delta).epsilon(1e-12));
    CHECK(rm.upper ==
          doctest::Approx(lambda * rb.upper + delta).epsilon(1e-12));
  }
}

TEST_CASE("half-width shrinks to zero when g2 > 0") {
  const auto shape = BoundaryShape::canonical(0.0, 0.25);
  StreamState s(100);
  CounterRng rng(3, 1);
  double hw_1e3 = 0.0;
  double hw_1e4 = 0.0;
  for (int t = 1; t <= 50000; ++t) {
    s.update(rng.next_gaussian());
    if (t == 1000) hw_1e3 = interval(s, shape, kTwo).half_width;
    if (t == 10000) hw_1e4 = interval(s, shape, kTwo).half_width;
  }
  const double hw_5e4 = interval(s, shape, kTwo).half_width;
  CHECK(hw_1e4 < hw_1e3);
  CHECK(hw_5e4 < hw_1e4);
  CHECK(hw_5e4 < 0.05);
}
