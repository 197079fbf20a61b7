#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

namespace csmon {

enum class VarianceMethod { IidSample, BartlettLongRun };

struct BartlettOptions {
  // Bandwidth H used in the kernel sum; -1 selects floor(t^(1/3)).
  int fixed_bandwidth = -1;
  // Upper bound on the bandwidth; also the lag depth kept in memory.
  int max_bandwidth = 64;
};

// Online sufficient statistics for one monitored stream: count, running
// mean, centered sum of squares (Welford recurrence), and, when the
// long-run method is active, lagged cross-product accumulators with a
// rolling window of recent observations.
//
// stddev() implements the positivity guard: it returns +inf until the
// underlying variance estimate is strictly positive, so early times and
// degenerate streams produce whole-line intervals instead of nonsense.
// Memory is O(max_bandwidth), independent of the stream length; update()
// and variance() cost O(bandwidth).
class StreamState {
 public:
  explicit StreamState(std::int64_t m, std::int64_t suppress_horizon = 1,
                       VarianceMethod method = VarianceMethod::IidSample,
                       BartlettOptions options = {});

  // Resumes an iid-method stream from raw moments (testing / checkpoints).
  static StreamState from_moments(std::int64_t m, std::int64_t suppress_horizon,
                                  std::int64_t t, double mean, double m2);

  // Appends one observation. Throws on non-finite input, leaving the state
  // unchanged.
  void update(double x);

  std::int64_t count() const { return t_; }
  double mean() const { return mean_; }
  double m2() const { return m2_; }

  // Current variance estimate before the positivity guard:
  //   IidSample       m2/(t-1), or +inf when t < 2
  //   BartlettLongRun sum_{|h|<=H} (1-|h|/(H+1)) acov(h), or +inf when
  //                   t <= H+1 (can be negative; stddev() guards).
  double variance() const;

  // sqrt(variance()) when that is strictly positive and finite, else +inf.
  double stddev() const;

  // Plug-in autocovariance acov(h) = (1/t) sum (x_i - mean)(x_{i+h} - mean)
  // for 0 <= h <= min(max_bandwidth, t-1); 0 beyond the stream length.
  double autocovariance(int lag) const;

  // Bandwidth the next variance() call will use.
  int bandwidth() const;

  std::int64_t m() const { return m_; }
  std::int64_t suppress_horizon() const { return suppress_horizon_; }
  VarianceMethod method() const { return method_; }

  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

 private:
  std::int64_t m_;
  std::int64_t suppress_horizon_;
  VarianceMethod method_;
  BartlettOptions options_;

  std::int64_t t_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;

  // Bartlett bookkeeping, all indexed by lag h = 1..max_bandwidth:
  //   lag_products_[h-1]  sum over i > h of x_i * x_{i-h}
  //   tail_sums_[h-1]     sum of the last min(h, t) observations
  //   head_prefix_[k]     sum of the first k observations, k <= max_bandwidth
  //   window_             ring buffer of the last max_bandwidth observations
  std::vector<double> lag_products_;
  std::vector<double> tail_sums_;
  std::vector<double> head_prefix_;
  std::vector<double> window_;
};

// Report-suppression presets: "1" (none), "log" -> ceil(log m),
// "sqrt" -> ceil(sqrt m), or a literal nonnegative integer.
std::int64_t suppress_horizon_preset(std::string_view name, std::int64_t m);

}  // namespace csmon
