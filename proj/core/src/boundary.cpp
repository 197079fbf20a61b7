#include "csmon/boundary.hpp"

#include <charconv>
#include <cmath>

namespace csmon {

namespace {

void check_exponents(double gamma1, double gamma2) {
  if (!(gamma1 >= 0.0 && gamma1 < 0.5))
    throw std::invalid_argument("gamma1 must lie in [0, 1/2)");
  if (!(gamma2 >= 0.0 && gamma2 < 0.5))
    throw std::invalid_argument("gamma2 must lie in [0, 1/2)");
}

std::string shortest_repr(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

BoundaryShape BoundaryShape::canonical(double gamma1, double gamma2) {
  check_exponents(gamma1, gamma2);
  BoundaryShape s;
  s.kind_ = ShapeKind::Canonical;
  s.gamma1_ = gamma1;
  s.gamma2_ = gamma2;
  s.endpoint_ = kInfinity;
  s.exponent_sum_ = gamma1 + gamma2 - 1.0;
  return s;
}

BoundaryShape BoundaryShape::custom(std::string label, Evaluator evaluator,
                                    double gamma1, double gamma2,
                                    double endpoint) {
  check_exponents(gamma1, gamma2);
  if (!evaluator) throw std::invalid_argument("custom shape needs an evaluator");
  if (!(endpoint > 0.0)) throw std::invalid_argument("endpoint must be positive");
  // Labels become cache keys in a space-delimited record format.
  if (label.empty() ||
      label.find_first_of(" \t\n\r") != std::string::npos)
    throw std::invalid_argument("custom shape label must be non-empty and "
                                "contain no whitespace");
  BoundaryShape s;
  s.kind_ = ShapeKind::Custom;
  s.gamma1_ = gamma1;
  s.gamma2_ = gamma2;
  s.endpoint_ = endpoint;
  s.evaluator_ = std::move(evaluator);
  s.label_ = std::move(label);
  return s;
}

double BoundaryShape::weight(double s) const {
  if (!std::isfinite(s) || s <= 0.0)
    throw std::invalid_argument("weight argument must be a finite positive real");
  if (s > endpoint_) return 0.0;
  if (kind_ == ShapeKind::Canonical)
    return std::pow(1.0 + s, exponent_sum_) / std::pow(s, gamma1_);
  const double v = evaluator_(s);
  if (!std::isfinite(v) || v < 0.0)
    throw std::domain_error("custom weight evaluator produced an invalid value");
  return v;
}

std::string BoundaryShape::key() const {
  if (kind_ == ShapeKind::Canonical)
    return "canonical:g1=" + shortest_repr(gamma1_) +
           ",g2=" + shortest_repr(gamma2_);
  return "custom:" + label_;
}

double boundary_width(const BoundaryShape& shape, std::int64_t m,
                      std::int64_t t) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (t < 1) throw std::invalid_argument("t must be >= 1");
  const double s = static_cast<double>(t) / static_cast<double>(m);
  const double rho = shape.weight(s);
  if (rho == 0.0) return BoundaryShape::kInfinity;
  return std::sqrt(static_cast<double>(m)) / (static_cast<double>(t) * rho);
}

std::vector<double> default_probe_grid(double endpoint) {
  constexpr int kPerDecade = 25;
  constexpr int kDecades = 24;  // 1e-12 .. 1e12
  std::vector<double> probes;
  probes.reserve(kPerDecade * kDecades + 1);
  const double step = std::pow(10.0, 1.0 / kPerDecade);
  double s = 1e-12;
  for (int i = 0; i <= kPerDecade * kDecades; ++i) {
    if (s > endpoint) break;
    probes.push_back(s);
    s *= step;
  }
  return probes;
}

ShapeValidation validate_shape(const BoundaryShape& shape,
                               std::span<const double> probes, double cap) {
  ShapeValidation report;
  if (probes.empty()) {
    report.failures.push_back("empty probe grid");
    return report;
  }
  for (double s : probes) {
    double rho;
    try {
      rho = shape.weight(s);
    } catch (const std::exception& e) {
      report.failures.push_back(std::string("weight evaluation failed: ") +
                                e.what());
      return report;
    }
    if (rho < 0.0) {
      report.failures.push_back("negative weight at s=" + std::to_string(s));
      continue;
    }
    if (s < 1.0) {
      const double v = std::pow(s, shape.gamma1()) * rho;
      if (v > report.small_s_sup) report.small_s_sup = v;
    }
    if (s > 1.0) {
      const double v = std::pow(s, 1.0 - shape.gamma2()) * rho;
      if (v > report.large_s_sup) report.large_s_sup = v;
    }
  }
  if (report.small_s_sup > cap)
    report.failures.push_back("small-s probe supremum " +
                              std::to_string(report.small_s_sup) +
                              " exceeds cap");
  if (report.large_s_sup > cap)
    report.failures.push_back("large-s probe supremum " +
                              std::to_string(report.large_s_sup) +
                              " exceeds cap");
  report.pass = report.failures.empty();
  return report;
}

BoundaryShape parse_shape_spec(std::string_view spec) {
  constexpr std::string_view kPrefix = "canonical:";
  if (spec.substr(0, kPrefix.size()) != kPrefix)
    throw ShapeParseError("kind", "shape spec must start with 'canonical:'");
  std::string_view rest = spec.substr(kPrefix.size());

  auto parse_field = [&](std::string_view name,
                         std::string_view text) -> double {
    const std::string prefix = std::string(name) + "=";
    if (text.substr(0, prefix.size()) != prefix)
      throw ShapeParseError(std::string(name),
                            "expected field '" + std::string(name) + "='");
    const std::string_view num = text.substr(prefix.size());
    double value = 0.0;
    const auto res =
        std::from_chars(num.data(), num.data() + num.size(), value);
    if (res.ec != std::errc{} || res.ptr != num.data() + num.size())
      throw ShapeParseError(std::string(name),
                            "field '" + std::string(name) +
                                "' is not a number: '" + std::string(num) +
                                "'");
    return value;
  };

  const auto comma = rest.find(',');
  if (comma == std::string_view::npos)
    throw ShapeParseError("g2", "missing ',g2=' part in shape spec");
  const double g1 = parse_field("g1", rest.substr(0, comma));
  const double g2 = parse_field("g2", rest.substr(comma + 1));
  if (!(g1 >= 0.0 && g1 < 0.5))
    throw ShapeParseError("g1", "g1 must lie in [0, 1/2)");
  if (!(g2 >= 0.0 && g2 < 0.5))
    throw ShapeParseError("g2", "g2 must lie in [0, 1/2)");
  return BoundaryShape::canonical(g1, g2);
}

}  // namespace csmon
