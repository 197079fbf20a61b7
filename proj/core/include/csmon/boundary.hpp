#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace csmon {

enum class ShapeKind { Canonical, Custom };

struct ShapeParseError : std::invalid_argument {
  ShapeParseError(const std::string& field_name, const std::string& what)
      : std::invalid_argument(what), field(field_name) {}
  std::string field;
};

// Weight function rho on (0, inf) that shapes the monitoring boundary.
// The canonical family is rho(s) = (1+s)^(g1+g2-1) / s^g1 with tail
// exponents 0 <= g1, g2 < 1/2; it is positive everywhere, so its endpoint
// is infinite. Custom shapes supply an evaluator plus *declared* exponents
// and endpoint; consistency is probed by validate_shape, not inferred.
class BoundaryShape {
 public:
  using Evaluator = std::function<double(double)>;

  static BoundaryShape canonical(double gamma1, double gamma2);
  static BoundaryShape custom(std::string label, Evaluator evaluator,
                              double gamma1, double gamma2,
                              double endpoint = kInfinity);

  // rho(s). Returns 0 for s beyond the endpoint; throws on s <= 0 or
  // non-finite s, and on a custom evaluator producing a negative or
  // non-finite value.
  double weight(double s) const;

  double gamma1() const { return gamma1_; }
  double gamma2() const { return gamma2_; }
  double endpoint() const { return endpoint_; }
  ShapeKind kind() const { return kind_; }

  // Canonical textual form, also the quantile-cache key:
  //   canonical:g1=<v>,g2=<v>     or     custom:<label>
  std::string key() const;

  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

 private:
  BoundaryShape() = default;

  ShapeKind kind_ = ShapeKind::Canonical;
  double gamma1_ = 0.0;
  double gamma2_ = 0.0;
  double endpoint_ = kInfinity;
  double exponent_sum_ = -1.0;  // g1+g2-1, cached for the canonical formula
  Evaluator evaluator_;
  std::string label_;
};

// Boundary width b_t = sqrt(m) / (t * rho(t/m)). Returns +inf when the
// weight vanishes (t/m beyond the endpoint), which encodes a whole-line
// interval: with a finite endpoint at most floor(m * endpoint) observations
// are ever monitored. Throws unless m >= 1 and t >= 1.
double boundary_width(const BoundaryShape& shape, std::int64_t m,
                      std::int64_t t);

struct ShapeValidation {
  bool pass = false;
  double small_s_sup = 0.0;  // sup over probes < 1 of s^g1 * rho(s)
  double large_s_sup = 0.0;  // sup over probes > 1 of s^(1-g2) * rho(s)
  std::vector<std::string> failures;
};

// Default probe grid: geometric from 1e-12 to 1e12 (25 points per decade),
// clipped to (0, endpoint].
std::vector<double> default_probe_grid(double endpoint);

// Probes the declared tail bounds: s^g1 * rho(s) on the small-s side and
// s^(1-g2) * rho(s) on the large-s side must stay below cap, and rho must be
// nonnegative everywhere probed. Reports the empirical suprema either way.
ShapeValidation validate_shape(const BoundaryShape& shape,
                               std::span<const double> probes,
                               double cap = 1e6);

// Parses the canonical textual form; throws ShapeParseError naming the bad
// field.
BoundaryShape parse_shape_spec(std::string_view spec);

}  // namespace csmon
