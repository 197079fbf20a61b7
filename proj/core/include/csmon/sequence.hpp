#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "csmon/boundary.hpp"
#include "csmon/estimators.hpp"
#include "csmon/quantiles.hpp"

namespace csmon {

// One monitoring step: the open interval mean +- half_width. A half_width
// of +inf (suppressed time, no positive variance estimate yet, or vanished
// boundary weight) yields the whole real line.
struct IntervalRecord {
  std::int64_t t = 0;
  double mean = 0.0;
  double sigma = 0.0;
  double half_width = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double mu) const { return lower < mu && mu < upper; }
  bool whole_line() const { return !(half_width < BoundaryShape::kInfinity); }
};

enum class Direction { TwoSided, Right, Left };

struct TestVerdict {
  std::int64_t t = 0;
  double mu0 = 0.0;
  Direction direction = Direction::TwoSided;
  bool reject = false;
};

// Interval at the current time of the stream. Requires a two-sided critical
// value. Times t <= suppress_horizon report the whole line.
IntervalRecord interval(const StreamState& state, const BoundaryShape& shape,
                        const CriticalValue& c);

// Two-sided sequential test of mu0. Rejection is the exact complement of
// interval membership: a boundary tie rejects, the interval stays open, and
// the duality holds without floating-point exceptions because both sides
// compare against the same lower/upper values.
TestVerdict test_two_sided(const StreamState& state, const BoundaryShape& shape,
                           const CriticalValue& c, double mu0);

// One-sided test with a one-sided critical value. Right rejects when mu0
// lies at or below mean - width, Left when mu0 lies at or above mean + width;
// negating the data stream and mu0 swaps the two verdicts exactly.
TestVerdict test_one_sided(const StreamState& state, const BoundaryShape& shape,
                           const CriticalValue& c_one_sided, double mu0,
                           Direction direction);

enum class BatteryMode { RightOnly, LeftOnly, Both };

// Simultaneous one-sided tests over an ordered grid of means. RightOnly /
// LeftOnly take the one-sided critical value; Both runs right and left tests
// per grid point (two verdicts each, right first) and takes the two-sided
// value. Right rejections always form a prefix of the grid, left rejections
// a suffix. Throws unless mus is strictly increasing.
std::vector<TestVerdict> hierarchical_battery(const StreamState& state,
                                              const BoundaryShape& shape,
                                              const CriticalValue& c,
                                              std::span<const double> mus,
                                              BatteryMode mode);

}  // namespace csmon
