#include "csmon/quantiles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "csmon/parallel.hpp"
#include "csmon/stats.hpp"

namespace csmon {

std::string to_string(Sided sided) {
  return sided == Sided::TwoSided ? "two-sided" : "one-sided";
}

Sided sided_from_string(std::string_view text) {
  if (text == "two-sided" || text == "two") return Sided::TwoSided;
  if (text == "one-sided" || text == "one") return Sided::OneSided;
  throw std::invalid_argument("sidedness must be 'two' or 'one'");
}

PathGrid PathGrid::with_endpoint_clusters(int n_uniform) {
  if (n_uniform < 1) throw std::invalid_argument("grid size must be >= 1");
  constexpr int kClusterPoints = 64;
  constexpr double kClusterRatio = 0.8;
  constexpr double kInnermost = 1e-10;

  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(n_uniform) + 2 * kClusterPoints);
  for (int i = 1; i <= n_uniform; ++i)
    pts.push_back(static_cast<double>(i) /
                  static_cast<double>(n_uniform + 1));
  double offset = kInnermost;
  for (int i = 0; i < kClusterPoints; ++i) {
    pts.push_back(offset);
    pts.push_back(1.0 - offset);
    offset /= kClusterRatio;
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  PathGrid grid{std::move(pts)};
  if (grid.points.front() <= 0.0 || grid.points.back() >= 1.0)
    throw std::logic_error("grid points must lie strictly inside (0,1)");
  return grid;
}

namespace detail {

double brownian_path(CounterRng& rng, std::span<const double> points,
                     std::span<double> w) {
  double prev = 0.0;
  double value = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    value += std::sqrt(points[i] - prev) * rng.next_gaussian();
    w[i] = value;
    prev = points[i];
  }
  return value;
}

double brownian_path_scaled(CounterRng& rng, std::span<const double> sqrt_dx,
                            std::span<double> w) {
  double value = 0.0;
  for (std::size_t i = 0; i < sqrt_dx.size(); ++i) {
    value += sqrt_dx[i] * rng.next_gaussian();
    w[i] = value;
  }
  return value;
}

}  // namespace detail

namespace {

struct PathSups {
  double up;    // sup of the signed weighted path
  double down;  // sup of the reflected path
};

// Assembles per-path sups into the requested sample layout. One-sided
// samples interleave (up, down) per path.
SupSample assemble(std::vector<PathSups> sups, Sided sided) {
  SupSample sample;
  sample.n_paths = static_cast<std::int64_t>(sups.size());
  if (sided == Sided::TwoSided) {
    sample.values.resize(sups.size());
    for (std::size_t i = 0; i < sups.size(); ++i)
      sample.values[i] = std::max(sups[i].up, sups[i].down);
  } else {
    sample.values.resize(2 * sups.size());
    for (std::size_t i = 0; i < sups.size(); ++i) {
      sample.values[2 * i] = sups[i].up;
      sample.values[2 * i + 1] = sups[i].down;
    }
  }
  return sample;
}

SupSample sample_weighted_sups(std::span<const double> points,
                               std::span<const double> weights, bool bridge,
                               std::int64_t n_paths, std::uint64_t seed,
                               Sided sided, int threads) {
  if (n_paths < 0) throw std::invalid_argument("n_paths must be >= 0");
  std::vector<PathSups> sups(static_cast<std::size_t>(n_paths));
  const std::size_t n = points.size();
  std::vector<double> sqrt_dx(n);
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sqrt_dx[i] = std::sqrt(points[i] - prev);
    prev = points[i];
  }
  // Bridge paths need W(1) to pin the endpoint, one increment past the grid.
  const double sqrt_last =
      bridge ? std::sqrt(1.0 - points.back()) : 0.0;
  parallel_for(n_paths, threads, [&](std::int64_t path) {
    thread_local std::vector<double> w;
    w.resize(n);
    CounterRng rng(seed, static_cast<std::uint64_t>(path));
    double w1 = detail::brownian_path_scaled(rng, sqrt_dx, w);
    if (bridge) w1 += sqrt_last * rng.next_gaussian();
    double up = -BoundaryShape::kInfinity;
    double down = -BoundaryShape::kInfinity;
    for (std::size_t i = 0; i < n; ++i) {
      const double centered = bridge ? w[i] - points[i] * w1 : w[i];
      const double v = weights[i] * centered;
      up = std::max(up, v);
      down = std::max(down, -v);
    }
    sups[static_cast<std::size_t>(path)] = {up, down};
  });
  return assemble(std::move(sups), sided);
}

}  // namespace

SupSample sample_bridge_sup(double gamma1, double gamma2, const PathGrid& grid,
                            std::int64_t n_paths, std::uint64_t seed,
                            Sided sided, int threads) {
  if (!(gamma1 >= 0.0 && gamma1 < 0.5) || !(gamma2 >= 0.0 && gamma2 < 0.5))
    throw std::invalid_argument("exponents must lie in [0, 1/2)");
  if (grid.points.empty()) throw std::invalid_argument("empty grid");
  std::vector<double> weights(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.points[i];
    weights[i] = 1.0 / (std::pow(x, gamma1) * std::pow(1.0 - x, gamma2));
  }
  return sample_weighted_sups(grid.points, weights, /*bridge=*/true, n_paths,
                              seed, sided, threads);
}

std::vector<double> wiener_grid(double y_max, int grid_n) {
  if (!(y_max > 0.0)) throw std::invalid_argument("y_max must be positive");
  const PathGrid base = PathGrid::with_endpoint_clusters(grid_n);
  std::vector<double> ys;
  ys.reserve(base.size());
  for (double x : base.points) {
    const double y = x / (1.0 - x);
    if (y > y_max) break;
    ys.push_back(y);
  }
  if (ys.empty()) throw std::invalid_argument("y_max below the smallest grid point");
  return ys;
}

SupSample sample_wiener_sup(const BoundaryShape& shape, double y_max,
                            int grid_n, std::int64_t n_paths,
                            std::uint64_t seed, Sided sided, int threads) {
  const std::vector<double> ys = wiener_grid(y_max, grid_n);
  std::vector<double> weights(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) weights[i] = shape.weight(ys[i]);
  return sample_weighted_sups(ys, weights, /*bridge=*/false, n_paths, seed,
                              sided, threads);
}

double default_y_max(const BoundaryShape& shape) {
  constexpr double kCap = 1e6;
  double cap = std::min(kCap, shape.endpoint());
  // Declared tail bound for the (A2) side, probed on the standard grid;
  // the truncated mass scales like bound * 3 * V^(g2 - 1/2).
  double bound = 0.0;
  for (double s : default_probe_grid(shape.endpoint())) {
    if (s <= 1.0) continue;
    bound = std::max(bound, std::pow(s, 1.0 - shape.gamma2()) * shape.weight(s));
  }
  if (bound <= 0.0) return cap;
  const double exponent = shape.gamma2() - 0.5;
  const double v = std::pow(1e-3 / (3.0 * bound), 1.0 / exponent);
  return std::clamp(v, 1.0, cap);
}

CriticalValue critical_value_from_sample(const SupSample& sample,
                                         const std::string& shape_key,
                                         double alpha, Sided sided, int grid_n,
                                         std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0,1)");
  std::vector<double> sorted = sample.values;
  std::sort(sorted.begin(), sorted.end());
  const QuantileEstimate est =
      empirical_quantile_with_error(sorted, 1.0 - alpha);
  CriticalValue cv;
  cv.shape_key = shape_key;
  cv.alpha = alpha;
  cv.sided = sided;
  cv.value = est.value;
  cv.std_error = est.std_error;
  cv.mc_paths = sample.n_paths;
  cv.grid_n = grid_n;
  cv.seed = seed;
  return cv;
}

std::vector<CriticalValue> critical_values(const BoundaryShape& shape,
                                           std::span<const double> alphas,
                                           Sided sided, std::int64_t n_paths,
                                           int grid_n, std::uint64_t seed,
                                           int threads) {
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0))
      throw std::invalid_argument("alpha must lie in (0,1)");
  if (n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
  SupSample sample;
  if (shape.kind() == ShapeKind::Canonical) {
    const PathGrid grid = PathGrid::with_endpoint_clusters(grid_n);
    sample = sample_bridge_sup(shape.gamma1(), shape.gamma2(), grid, n_paths,
                               seed, sided, threads);
  } else {
    sample = sample_wiener_sup(shape, default_y_max(shape), grid_n, n_paths,
                               seed, sided, threads);
  }
  std::sort(sample.values.begin(), sample.values.end());
  std::vector<CriticalValue> out;
  out.reserve(alphas.size());
  for (double a : alphas) {
    const QuantileEstimate est =
        empirical_quantile_with_error(sample.values, 1.0 - a);
    CriticalValue cv;
    cv.shape_key = shape.key();
    cv.alpha = a;
    cv.sided = sided;
    cv.value = est.value;
    cv.std_error = est.std_error;
    cv.mc_paths = sample.n_paths;
    cv.grid_n = grid_n;
    cv.seed = seed;
    out.push_back(cv);
  }
  return out;
}

CriticalValue critical_value(const BoundaryShape& shape, double alpha,
                             Sided sided, std::int64_t n_paths, int grid_n,
                             std::uint64_t seed, int threads) {
  const double alphas[] = {alpha};
  return critical_values(shape, alphas, sided, n_paths, grid_n, seed,
                         threads)[0];
}

double kolmogorov_series_cdf(double x) {
  // Below 0.25 the true CDF is under 1e-12 while the truncated alternating
  // series has not converged yet, so cut it off directly.
  if (x < 0.25) return 0.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return 1.0 - 2.0 * sum;
}

double kolmogorov_series_quantile(double alpha, Sided sided) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0,1)");
  if (sided == Sided::OneSided) return std::sqrt(-std::log(alpha) / 2.0);
  const double target = 1.0 - alpha;
  double lo = 0.0;
  double hi = 4.0;
  while (kolmogorov_series_cdf(hi) < target) hi *= 2.0;
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    if (kolmogorov_series_cdf(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace csmon
