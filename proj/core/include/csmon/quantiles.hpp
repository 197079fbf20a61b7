#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "csmon/boundary.hpp"
#include "csmon/rng.hpp"

namespace csmon {

enum class Sided { TwoSided, OneSided };

std::string to_string(Sided sided);
Sided sided_from_string(std::string_view text);

// Evaluation abscissae in (0,1) for the bridge functional. The default
// composition is a uniform grid plus geometric clusters running into both
// endpoints (ratio 0.8, 64 points per side, innermost offset 1e-10): the
// endpoint weights x^-g1 and (1-x)^-g2 push the supremum toward the edges,
// and a plain uniform grid would bias it low.
struct PathGrid {
  std::vector<double> points;

  static PathGrid with_endpoint_clusters(int n_uniform);
  std::size_t size() const { return points.size(); }
};

// Monte Carlo draws of a supremum functional. Two-sided draws are
// nonnegative; one-sided sampling emits two draws per underlying path (the
// path and its reflection), so one- and two-sided estimates from the same
// seed nest exactly: for every path, each one-sided draw is bounded by the
// two-sided draw.
struct SupSample {
  std::vector<double> values;
  std::int64_t n_paths = 0;
};

inline constexpr std::int64_t kDefaultPaths = 100000;
inline constexpr int kDefaultGridSize = 8192;
inline constexpr std::uint64_t kDefaultSeed = 5;

// Draws of sup_x |B(x)| / (x^g1 (1-x)^g2) over the grid, with B a standard
// Brownian bridge built from Gaussian increments (W pinned by subtracting
// x*W(1)). Deterministic in (seed, grid, n_paths); path i uses rng stream i.
SupSample sample_bridge_sup(double gamma1, double gamma2, const PathGrid& grid,
                            std::int64_t n_paths, std::uint64_t seed,
                            Sided sided, int threads = 0);

// Draws of sup_y rho(y) |W(y)| truncated at y_max, simulated directly from
// Wiener increments on wiener_grid(shape, y_max, grid_n).
SupSample sample_wiener_sup(const BoundaryShape& shape, double y_max,
                            int grid_n, std::int64_t n_paths,
                            std::uint64_t seed, Sided sided, int threads = 0);

// Evaluation points for the direct Wiener functional: the bridge grid mapped
// through y = x/(1-x) and truncated to (0, y_max]. The map keeps the spacing
// geometric toward both ends and matches the bridge discretization, so the
// two samplers target the same discretized law for canonical shapes.
std::vector<double> wiener_grid(double y_max, int grid_n);

// Truncation horizon such that the declared large-s tail bound contributes
// less than ~1e-3 to the supremum, capped at 1e6 and at the shape endpoint.
double default_y_max(const BoundaryShape& shape);

struct CriticalValue {
  std::string shape_key;
  double alpha = 0.0;
  Sided sided = Sided::TwoSided;
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t mc_paths = 0;
  int grid_n = 0;
  std::uint64_t seed = 0;
};

// (1-alpha)-quantile of the boundary-crossing supremum: the upper order
// statistic at rank ceil((1-alpha)*n) of the Monte Carlo sample. Canonical
// shapes use the bridge sampler (exact change of variables x = y/(1+y));
// custom shapes fall back to the truncated Wiener sampler.
CriticalValue critical_value(const BoundaryShape& shape, double alpha,
                             Sided sided, std::int64_t n_paths = kDefaultPaths,
                             int grid_n = kDefaultGridSize,
                             std::uint64_t seed = kDefaultSeed,
                             int threads = 0);

// Same, for several alpha levels from one shared sample.
std::vector<CriticalValue> critical_values(
    const BoundaryShape& shape, std::span<const double> alphas, Sided sided,
    std::int64_t n_paths = kDefaultPaths, int grid_n = kDefaultGridSize,
    std::uint64_t seed = kDefaultSeed, int threads = 0);

// Quantile of a supremum sample under the critical-value conventions.
CriticalValue critical_value_from_sample(const SupSample& sample,
                                         const std::string& shape_key,
                                         double alpha, Sided sided, int grid_n,
                                         std::uint64_t seed);

// Analytic (1-alpha)-quantile for the unweighted case g1 = g2 = 0:
// two-sided solves the Kolmogorov series 1 - 2 sum (-1)^(k+1) e^(-2 k^2 x^2)
// by bisection to 1e-8; one-sided inverts 1 - e^(-2 x^2) in closed form.
double kolmogorov_series_quantile(double alpha, Sided sided);
double kolmogorov_series_cdf(double x);

namespace detail {
// Fills w[i] = W(points[i]) from sequential Gaussian increments and returns
// W(1); shared by the bridge sampler and the grid-refinement tests.
double brownian_path(CounterRng& rng, std::span<const double> points,
                     std::span<double> w);
}  // namespace detail

}  // namespace csmon
