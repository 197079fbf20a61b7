#include "csmon/sequence.hpp"

#include <stdexcept>

namespace csmon {

namespace {

constexpr double kInf = BoundaryShape::kInfinity;

// sigma * c * b_t, forced to +inf at suppressed times; any infinite factor
// propagates.
double half_width_at(const StreamState& state, const BoundaryShape& shape,
                     const CriticalValue& c) {
  if (state.count() < 1) throw std::logic_error("no observations yet");
  if (state.count() <= state.suppress_horizon()) return kInf;
  const double sigma = state.stddev();
  const double width = boundary_width(shape, state.m(), state.count());
  // c*width first: simulation loops precompute that product per t and must
  // reproduce these comparisons bit for bit.
  return sigma * (c.value * width);
}

}  // namespace

IntervalRecord interval(const StreamState& state, const BoundaryShape& shape,
                        const CriticalValue& c) {
  if (c.sided != Sided::TwoSided)
    throw std::invalid_argument("interval needs a two-sided critical value");
  IntervalRecord rec;
  rec.t = state.count();
  rec.mean = state.mean();
  rec.sigma = state.stddev();
  rec.half_width = half_width_at(state, shape, c);
  rec.lower = rec.mean - rec.half_width;
  rec.upper = rec.mean + rec.half_width;
  return rec;
}

TestVerdict test_two_sided(const StreamState& state, const BoundaryShape& shape,
                           const CriticalValue& c, double mu0) {
  const IntervalRecord rec = interval(state, shape, c);
  return {rec.t, mu0, Direction::TwoSided, !rec.contains(mu0)};
}

TestVerdict test_one_sided(const StreamState& state, const BoundaryShape& shape,
                           const CriticalValue& c_one_sided, double mu0,
                           Direction direction) {
  if (c_one_sided.sided != Sided::OneSided)
    throw std::invalid_argument("one-sided test needs a one-sided critical value");
  if (direction == Direction::TwoSided)
    throw std::invalid_argument("direction must be Right or Left");
  const double hw = half_width_at(state, shape, c_one_sided);
  const double mean = state.mean();
  const bool reject =
      direction == Direction::Right ? mu0 <= mean - hw : mu0 >= mean + hw;
  return {state.count(), mu0, direction, reject};
}

std::vector<TestVerdict> hierarchical_battery(const StreamState& state,
                                              const BoundaryShape& shape,
                                              const CriticalValue& c,
                                              std::span<const double> mus,
                                              BatteryMode mode) {
  for (std::size_t i = 1; i < mus.size(); ++i)
    if (!(mus[i - 1] < mus[i]))
      throw std::invalid_argument("battery means must be strictly increasing");
  const Sided wanted =
      mode == BatteryMode::Both ? Sided::TwoSided : Sided::OneSided;
  if (c.sided != wanted)
    throw std::invalid_argument(
        mode == BatteryMode::Both
            ? "Both mode needs the two-sided critical value"
            : "one-sided battery needs the one-sided critical value");

  const double hw = half_width_at(state, shape, c);
  const double mean = state.mean();
  const double right_threshold = mean - hw;
  const double left_threshold = mean + hw;
  const std::int64_t t = state.count();

  std::vector<TestVerdict> verdicts;
  verdicts.reserve(mode == BatteryMode::Both ? 2 * mus.size() : mus.size());
  for (double mu : mus) {
    if (mode != BatteryMode::LeftOnly)
      verdicts.push_back({t, mu, Direction::Right, mu <= right_threshold});
    if (mode != BatteryMode::RightOnly)
      verdicts.push_back({t, mu, Direction::Left, mu >= left_threshold});
  }
  return verdicts;
}

}  // namespace csmon
