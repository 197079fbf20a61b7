#include "csmon/estimators.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace csmon {

StreamState::StreamState(std::int64_t m, std::int64_t suppress_horizon,
                         VarianceMethod method, BartlettOptions options)
    : m_(m), suppress_horizon_(suppress_horizon), method_(method),
      options_(options) {
  if (m < 1) throw std::invalid_argument("burn-in scale m must be >= 1");
  if (suppress_horizon < 0)
    throw std::invalid_argument("suppression horizon must be >= 0");
  if (method == VarianceMethod::BartlettLongRun) {
    if (options_.max_bandwidth < 0)
      throw std::invalid_argument("max_bandwidth must be >= 0");
    if (options_.fixed_bandwidth > options_.max_bandwidth)
      throw std::invalid_argument("fixed bandwidth exceeds max_bandwidth");
    const auto depth = static_cast<std::size_t>(options_.max_bandwidth);
    lag_products_.assign(depth, 0.0);
    tail_sums_.assign(depth, 0.0);
    head_prefix_.assign(depth + 1, 0.0);
    window_.assign(depth, 0.0);
  }
}

StreamState StreamState::from_moments(std::int64_t m,
                                      std::int64_t suppress_horizon,
                                      std::int64_t t, double mean, double m2) {
  if (t < 0) throw std::invalid_argument("count must be >= 0");
  if (m2 < 0.0) throw std::invalid_argument("m2 must be >= 0");
  if (!std::isfinite(mean) || !std::isfinite(m2))
    throw std::invalid_argument("moments must be finite");
  StreamState s(m, suppress_horizon, VarianceMethod::IidSample);
  s.t_ = t;
  s.mean_ = mean;
  s.m2_ = m2;
  return s;
}

void StreamState::update(double x) {
  if (!std::isfinite(x))
    throw std::invalid_argument("observation must be finite");
  ++t_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(t_);
  m2_ += delta * (x - mean_);

  if (method_ == VarianceMethod::BartlettLongRun) {
    const auto depth = static_cast<std::int64_t>(options_.max_bandwidth);
    if (depth == 0) return;
    const std::int64_t lags = std::min(depth, t_ - 1);
    // x_{t-h} lives at ring slot (t-1-h) mod depth; x goes to (t-1) mod depth.
    for (std::int64_t h = 1; h <= lags; ++h) {
      const double past =
          window_[static_cast<std::size_t>((t_ - 1 - h) % depth)];
      lag_products_[static_cast<std::size_t>(h - 1)] += x * past;
      tail_sums_[static_cast<std::size_t>(h - 1)] += x - past;
    }
    for (std::int64_t h = lags + 1; h <= depth; ++h)
      tail_sums_[static_cast<std::size_t>(h - 1)] += x;
    if (t_ <= depth)
      head_prefix_[static_cast<std::size_t>(t_)] =
          head_prefix_[static_cast<std::size_t>(t_ - 1)] + x;
    window_[static_cast<std::size_t>((t_ - 1) % depth)] = x;
  }
}

int StreamState::bandwidth() const {
  if (method_ != VarianceMethod::BartlettLongRun) return 0;
  std::int64_t h;
  if (options_.fixed_bandwidth >= 0) {
    h = options_.fixed_bandwidth;
  } else {
    h = static_cast<std::int64_t>(std::cbrt(static_cast<double>(t_)) + 1e-9);
    while ((h + 1) * (h + 1) * (h + 1) <= t_) ++h;
    while (h > 0 && h * h * h > t_) --h;
  }
  if (h > options_.max_bandwidth) h = options_.max_bandwidth;
  if (h > t_ - 1) h = t_ > 0 ? t_ - 1 : 0;
  return static_cast<int>(h);
}

double StreamState::autocovariance(int lag) const {
  if (lag < 0) throw std::invalid_argument("lag must be >= 0");
  if (t_ == 0) throw std::logic_error("autocovariance of an empty stream");
  if (lag >= t_) return 0.0;
  const double t = static_cast<double>(t_);
  if (lag == 0) return m2_ / t;
  if (method_ != VarianceMethod::BartlettLongRun ||
      lag > options_.max_bandwidth)
    throw std::invalid_argument("lag exceeds the retained bandwidth");
  // Exact plug-in value from the accumulators:
  //   (1/t) [ S_h + mean*(head_h + tail_h) - (t+h)*mean^2 ]
  // with head_h / tail_h the sums of the first / last h observations.
  const auto h = static_cast<std::size_t>(lag);
  const double s_h = lag_products_[h - 1];
  const double heads = head_prefix_[h];
  const double tails = tail_sums_[h - 1];
  return (s_h + mean_ * (heads + tails) -
          (t + static_cast<double>(lag)) * mean_ * mean_) /
         t;
}

double StreamState::variance() const {
  if (method_ == VarianceMethod::IidSample) {
    if (t_ < 2) return kInfinity;
    return m2_ / static_cast<double>(t_ - 1);
  }
  const int h = bandwidth();
  if (t_ <= h + 1) return kInfinity;
  double value = autocovariance(0);
  for (int lag = 1; lag <= h; ++lag) {
    const double taper =
        1.0 - static_cast<double>(lag) / static_cast<double>(h + 1);
    value += 2.0 * taper * autocovariance(lag);
  }
  return value;
}

double StreamState::stddev() const {
  const double v = variance();
  if (!std::isfinite(v) || v <= 0.0) return kInfinity;
  return std::sqrt(v);
}

std::int64_t suppress_horizon_preset(std::string_view name, std::int64_t m) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (name == "log")
    return static_cast<std::int64_t>(
        std::ceil(std::log(static_cast<double>(m))));
  if (name == "sqrt")
    return static_cast<std::int64_t>(
        std::ceil(std::sqrt(static_cast<double>(m))));
  std::int64_t value = 0;
  const auto res = std::from_chars(name.data(), name.data() + name.size(), value);
  if (res.ec != std::errc{} || res.ptr != name.data() + name.size() ||
      value < 0)
    throw std::invalid_argument("suppression preset must be 'log', 'sqrt' or "
                                "a nonnegative integer");
  return value;
}

}  // namespace csmon
