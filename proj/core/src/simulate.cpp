#include "csmon/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "csmon/parallel.hpp"
#include "csmon/stats.hpp"

namespace csmon {

namespace {

constexpr double kInf = BoundaryShape::kInfinity;

// Keeps the limit-distribution sample off the replication substreams.
constexpr std::uint64_t kLimitSeedSalt = 0x9E3779B97F4A7C15ull;

std::string repr(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::int64_t resolve_horizon(std::int64_t horizon, std::int64_t m,
                             std::int64_t mult) {
  if (horizon > 0) return horizon;
  return m * mult;
}

std::int64_t resolve_suppress(std::int64_t suppress, std::int64_t m) {
  if (suppress >= 0) return suppress;
  return suppress_horizon_preset("log", m);
}

void check_common(std::int64_t m, std::int64_t n_reps, double alpha) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (n_reps < 1) throw std::invalid_argument("n_reps must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0,1)");
}

// c * b_t for t = 1..horizon; index 0 unused.
std::vector<double> width_table(const BoundaryShape& shape, std::int64_t m,
                                std::int64_t horizon, double c) {
  std::vector<double> cw(static_cast<std::size_t>(horizon) + 1, kInf);
  for (std::int64_t t = 1; t <= horizon; ++t)
    cw[static_cast<std::size_t>(t)] = c * boundary_width(shape, m, t);
  return cw;
}

std::vector<std::pair<double, double>> stopping_quantiles(
    std::vector<std::int64_t> stops) {
  std::vector<std::pair<double, double>> out;
  if (stops.empty()) return out;
  std::vector<double> sorted(stops.begin(), stops.end());
  std::sort(sorted.begin(), sorted.end());
  for (double q : {0.25, 0.5, 0.75, 0.9})
    out.emplace_back(q, empirical_quantile(sorted, q));
  return out;
}

void echo_dgp(SimReport& report, const DataGeneratingProcess& dgp) {
  report.config.emplace_back("dgp", dgp.name());
}

}  // namespace

DataGeneratingProcess DataGeneratingProcess::iid_normal(double mu,
                                                        double sigma) {
  if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma <= 0.0)
    throw std::invalid_argument("normal DGP needs finite mu and sigma > 0");
  DataGeneratingProcess d;
  d.kind = Kind::IidNormal;
  d.mu = mu;
  d.sigma = sigma;
  return d;
}

DataGeneratingProcess DataGeneratingProcess::centered_exponential(double rate,
                                                                  double mu) {
  if (!std::isfinite(mu) || !std::isfinite(rate) || rate <= 0.0)
    throw std::invalid_argument("exponential DGP needs finite mu and rate > 0");
  DataGeneratingProcess d;
  d.kind = Kind::IidCenteredExponential;
  d.mu = mu;
  d.rate = rate;
  return d;
}

DataGeneratingProcess DataGeneratingProcess::ar1(double phi,
                                                 double innovation_sigma,
                                                 double mu) {
  if (!std::isfinite(phi) || std::fabs(phi) >= 1.0)
    throw std::invalid_argument("AR(1) needs |phi| < 1");
  if (!std::isfinite(mu) || !std::isfinite(innovation_sigma) ||
      innovation_sigma <= 0.0)
    throw std::invalid_argument("AR(1) needs finite mu and sigma > 0");
  DataGeneratingProcess d;
  d.kind = Kind::Ar1;
  d.mu = mu;
  d.sigma = innovation_sigma;
  d.phi = phi;
  return d;
}

double DataGeneratingProcess::marginal_variance() const {
  switch (kind) {
    case Kind::IidNormal:
      return sigma * sigma;
    case Kind::IidCenteredExponential:
      return 1.0 / (rate * rate);
    case Kind::Ar1:
      return sigma * sigma / (1.0 - phi * phi);
  }
  return 0.0;
}

double DataGeneratingProcess::long_run_variance() const {
  if (kind == Kind::Ar1) return sigma * sigma / ((1.0 - phi) * (1.0 - phi));
  return marginal_variance();
}

std::string DataGeneratingProcess::name() const {
  switch (kind) {
    case Kind::IidNormal:
      return "normal(mu=" + repr(mu) + ",sigma=" + repr(sigma) + ")";
    case Kind::IidCenteredExponential:
      return "centered-exponential(rate=" + repr(rate) + ",mu=" + repr(mu) +
             ")";
    case Kind::Ar1:
      return "ar1(phi=" + repr(phi) + ",sigma=" + repr(sigma) +
             ",mu=" + repr(mu) + ")";
  }
  return "?";
}

double DgpStream::next() {
  switch (dgp_.kind) {
    case DataGeneratingProcess::Kind::IidNormal:
      return dgp_.mu + dgp_.sigma * rng_.next_gaussian();
    case DataGeneratingProcess::Kind::IidCenteredExponential: {
      const double e = -std::log(rng_.next_uniform()) / dgp_.rate;
      return dgp_.mu + e - 1.0 / dgp_.rate;
    }
    case DataGeneratingProcess::Kind::Ar1: {
      if (!ar_started_) {
        // Stationary start.
        ar_state_ = rng_.next_gaussian() * dgp_.sigma /
                    std::sqrt(1.0 - dgp_.phi * dgp_.phi);
        ar_started_ = true;
      } else {
        ar_state_ = dgp_.phi * ar_state_ + dgp_.sigma * rng_.next_gaussian();
      }
      return dgp_.mu + ar_state_;
    }
  }
  return 0.0;
}

std::string to_kv_text(const SimReport& report) {
  std::ostringstream os;
  os << "experiment=" << report.experiment << '\n';
  os << "n_reps=" << report.n_reps << '\n';
  os << "horizon=" << report.horizon << '\n';
  os << "estimate=" << repr(report.estimate) << '\n';
  os << "binomial_se=" << repr(report.binomial_se) << '\n';
  for (const auto& [q, v] : report.stopping_time_quantiles)
    os << "stopping_q" << repr(q) << '=' << repr(v) << '\n';
  for (const auto& [k, v] : report.config) os << "cfg." << k << '=' << v << '\n';
  for (const auto& [k, v] : report.details)
    os << "detail." << k << '=' << repr(v) << '\n';
  if (report.has_assertion) {
    os << "assertion=" << report.assertion_text << '\n';
    os << "assertion_pass=" << (report.assertion_pass ? 1 : 0) << '\n';
  }
  return os.str();
}

SimReport simulate_coverage(const CoverageConfig& config) {
  check_common(config.m, config.n_reps, config.alpha);
  if (config.c.sided != Sided::TwoSided)
    throw std::invalid_argument("coverage needs a two-sided critical value");
  const std::int64_t horizon = resolve_horizon(config.horizon, config.m, 100);
  const std::int64_t lm = resolve_suppress(config.suppress_horizon, config.m);
  const auto cw = width_table(config.shape, config.m, horizon, config.c.value);
  const double mu = config.dgp.mu;

  std::vector<std::uint8_t> covered(static_cast<std::size_t>(config.n_reps));
  parallel_for(config.n_reps, config.threads, [&](std::int64_t rep) {
    DgpStream stream(config.dgp,
                     CounterRng(config.seed, static_cast<std::uint64_t>(rep)));
    StreamState state(config.m, lm, config.var_method);
    bool ok = true;
    for (std::int64_t t = 1; t <= horizon; ++t) {
      state.update(stream.next());
      if (t <= lm) continue;
      const double hw = state.stddev() * cw[static_cast<std::size_t>(t)];
      const double mean = state.mean();
      if (!(mean - hw < mu && mu < mean + hw)) {
        ok = false;
        break;
      }
    }
    covered[static_cast<std::size_t>(rep)] = ok ? 1 : 0;
  });

  std::int64_t hits = 0;
  for (const auto c : covered) hits += c;

  SimReport report;
  report.experiment = "coverage";
  report.n_reps = config.n_reps;
  report.horizon = horizon;
  report.estimate =
      static_cast<double>(hits) / static_cast<double>(config.n_reps);
  report.binomial_se = binomial_std_error(report.estimate, config.n_reps);
  echo_dgp(report, config.dgp);
  report.config.emplace_back("shape", config.shape.key());
  report.config.emplace_back("alpha", repr(config.alpha));
  report.config.emplace_back("m", std::to_string(config.m));
  report.config.emplace_back("lm", std::to_string(lm));
  report.config.emplace_back("c", repr(config.c.value));
  report.config.emplace_back("seed", std::to_string(config.seed));
  report.details.emplace_back("noncoverage",
                              static_cast<double>(config.n_reps - hits));
  report.has_assertion = true;
  const double tol = 0.02 + 3.0 * report.binomial_se;
  report.assertion_pass =
      std::fabs(report.estimate - (1.0 - config.alpha)) <= tol;
  report.assertion_text =
      "|coverage - (1-alpha)| <= 0.02 + 3*binomial_se (horizon-truncated)";
  return report;
}

SimReport simulate_rejection(const RejectionConfig& config) {
  check_common(config.m, config.n_reps, config.alpha);
  if (config.c.sided != Sided::TwoSided)
    throw std::invalid_argument("rejection needs a two-sided critical value");
  const std::int64_t horizon = resolve_horizon(config.horizon, config.m, 50);
  const std::int64_t lm = resolve_suppress(config.suppress_horizon, config.m);
  const auto cw = width_table(config.shape, config.m, horizon, config.c.value);
  const double mu0 = config.mu0;

  std::vector<std::int64_t> stop(static_cast<std::size_t>(config.n_reps), -1);
  parallel_for(config.n_reps, config.threads, [&](std::int64_t rep) {
    DgpStream stream(config.dgp,
                     CounterRng(config.seed, static_cast<std::uint64_t>(rep)));
    StreamState state(config.m, lm, config.var_method);
    for (std::int64_t t = 1; t <= horizon; ++t) {
      state.update(stream.next());
      if (t <= lm) continue;
      const double hw = state.stddev() * cw[static_cast<std::size_t>(t)];
      const double mean = state.mean();
      if (!(mean - hw < mu0 && mu0 < mean + hw)) {
        stop[static_cast<std::size_t>(rep)] = t;
        break;
      }
    }
  });

  std::int64_t rejected = 0;
  std::vector<std::int64_t> stops;
  stops.reserve(stop.size());
  for (const auto s : stop)
    if (s > 0) {
      ++rejected;
      stops.push_back(s);
    }

  SimReport report;
  report.experiment = "rejection";
  report.n_reps = config.n_reps;
  report.horizon = horizon;
  report.estimate =
      static_cast<double>(rejected) / static_cast<double>(config.n_reps);
  report.binomial_se = binomial_std_error(report.estimate, config.n_reps);
  report.stopping_time_quantiles = stopping_quantiles(std::move(stops));
  echo_dgp(report, config.dgp);
  report.config.emplace_back("mu0", repr(mu0));
  report.config.emplace_back("shape", config.shape.key());
  report.config.emplace_back("alpha", repr(config.alpha));
  report.config.emplace_back("m", std::to_string(config.m));
  report.config.emplace_back("lm", std::to_string(lm));
  report.config.emplace_back("c", repr(config.c.value));
  report.config.emplace_back("seed", std::to_string(config.seed));
  report.has_assertion = true;
  if (mu0 == config.dgp.mu) {
    report.assertion_pass =
        report.estimate <= config.alpha + 3.0 * report.binomial_se;
    report.assertion_text = "size <= alpha + 3*binomial_se";
  } else {
    report.assertion_pass = report.estimate >= 0.995;
    report.assertion_text = "rejection rate >= 0.995 under the alternative";
  }
  return report;
}

SimReport simulate_fwer(const FwerConfig& config) {
  check_common(config.m, config.n_reps, config.alpha);
  for (std::size_t i = 1; i < config.mus.size(); ++i)
    if (!(config.mus[i - 1] < config.mus[i]))
      throw std::invalid_argument("mus must be strictly increasing");
  const Sided wanted =
      config.mode == BatteryMode::Both ? Sided::TwoSided : Sided::OneSided;
  if (config.c.sided != wanted)
    throw std::invalid_argument("critical value sidedness does not match mode");

  const std::int64_t horizon = resolve_horizon(config.horizon, config.m, 50);
  const std::int64_t lm = resolve_suppress(config.suppress_horizon, config.m);
  const auto cw = width_table(config.shape, config.m, horizon, config.c.value);
  const double mu_x = config.dgp.mu;

  // True nulls: mu_j >= mu_x on the right side, mu_j <= mu_x on the left.
  // By rejection monotonicity a false rejection happens iff the test at the
  // true null closest to mu_x fires, so the scan watches those two points
  // and the full battery is audited whenever one fires.
  double mu_above = kInf;
  double mu_below = -kInf;
  if (config.mode != BatteryMode::LeftOnly)
    for (double mu : config.mus)
      if (mu >= mu_x) {
        mu_above = mu;
        break;
      }
  if (config.mode != BatteryMode::RightOnly)
    for (auto it = config.mus.rbegin(); it != config.mus.rend(); ++it)
      if (*it <= mu_x) {
        mu_below = *it;
        break;
      }

  std::vector<std::uint8_t> any_false(static_cast<std::size_t>(config.n_reps),
                                      0);
  std::vector<std::uint8_t> audit_fail(static_cast<std::size_t>(config.n_reps),
                                       0);
  parallel_for(config.n_reps, config.threads, [&](std::int64_t rep) {
    DgpStream stream(config.dgp,
                     CounterRng(config.seed, static_cast<std::uint64_t>(rep)));
    StreamState state(config.m, lm, config.var_method);
    for (std::int64_t t = 1; t <= horizon; ++t) {
      state.update(stream.next());
      if (t <= lm) continue;
      const double hw = state.stddev() * cw[static_cast<std::size_t>(t)];
      const double mean = state.mean();
      const bool right_fire =
          config.mode != BatteryMode::LeftOnly && mu_above <= mean - hw;
      const bool left_fire =
          config.mode != BatteryMode::RightOnly && mu_below >= mean + hw;
      if (!right_fire && !left_fire) continue;

      any_false[static_cast<std::size_t>(rep)] = 1;
      // Audit: verdicts must agree with the battery and keep the
      // prefix/suffix structure.
      const auto verdicts = hierarchical_battery(state, config.shape, config.c,
                                                 config.mus, config.mode);
      bool ok = true;
      bool battery_false = false;
      bool seen_right_accept = false;
      double prev_left_mu = -kInf;
      bool seen_left_reject = false;
      for (const auto& v : verdicts) {
        if (v.direction == Direction::Right) {
          if (v.reject && seen_right_accept) ok = false;  // not a prefix
          if (!v.reject) seen_right_accept = true;
          if (v.reject && v.mu0 >= mu_x) battery_false = true;
        } else {
          if (v.mu0 > prev_left_mu) {
            // Left verdicts must form a suffix.
            if (seen_left_reject && !v.reject) ok = false;
            if (v.reject) seen_left_reject = true;
            prev_left_mu = v.mu0;
          }
          if (v.reject && v.mu0 <= mu_x) battery_false = true;
        }
      }
      if (!battery_false) ok = false;  // scan fired, battery must agree
      if (!ok) audit_fail[static_cast<std::size_t>(rep)] = 1;
      break;
    }
  });

  std::int64_t false_rejections = 0;
  std::int64_t audit_failures = 0;
  for (std::size_t i = 0; i < any_false.size(); ++i) {
    false_rejections += any_false[i];
    audit_failures += audit_fail[i];
  }

  SimReport report;
  report.experiment = "fwer";
  report.n_reps = config.n_reps;
  report.horizon = horizon;
  report.estimate = static_cast<double>(false_rejections) /
                    static_cast<double>(config.n_reps);
  report.binomial_se = binomial_std_error(report.estimate, config.n_reps);
  echo_dgp(report, config.dgp);
  std::string mus_text;
  for (double mu : config.mus) {
    if (!mus_text.empty()) mus_text += ',';
    mus_text += repr(mu);
  }
  report.config.emplace_back("mus", mus_text);
  report.config.emplace_back(
      "mode", config.mode == BatteryMode::RightOnly
                  ? "right"
                  : (config.mode == BatteryMode::LeftOnly ? "left" : "both"));
  report.config.emplace_back("shape", config.shape.key());
  report.config.emplace_back("alpha", repr(config.alpha));
  report.config.emplace_back("m", std::to_string(config.m));
  report.config.emplace_back("lm", std::to_string(lm));
  report.config.emplace_back("c", repr(config.c.value));
  report.config.emplace_back("seed", std::to_string(config.seed));
  report.details.emplace_back("prefix_violations",
                              static_cast<double>(audit_failures));
  report.has_assertion = true;
  report.assertion_pass =
      report.estimate <= config.alpha + 0.015 && audit_failures == 0;
  report.assertion_text = "FWER <= alpha + 0.015 and battery structure intact";
  return report;
}

namespace {

SupSample limit_sup_sample(const BoundaryShape& shape, std::int64_t n_paths,
                           int grid_n, std::uint64_t seed, int threads) {
  if (shape.kind() == ShapeKind::Canonical) {
    const PathGrid grid = PathGrid::with_endpoint_clusters(grid_n);
    return sample_bridge_sup(shape.gamma1(), shape.gamma2(), grid, n_paths,
                             seed, Sided::TwoSided, threads);
  }
  return sample_wiener_sup(shape, default_y_max(shape), grid_n, n_paths, seed,
                           Sided::TwoSided, threads);
}

}  // namespace

SupStatReport check_sup_statistic(const SupStatConfig& config) {
  if (config.m_values.empty())
    throw std::invalid_argument("need at least one m value");
  if (config.n_reps < 1 || config.limit_paths < 1)
    throw std::invalid_argument("n_reps and limit_paths must be >= 1");

  const SupSample limit =
      limit_sup_sample(config.shape, config.limit_paths, config.grid_n,
                       config.seed ^ kLimitSeedSalt, config.threads);

  SupStatReport report;
  report.n_reps = config.n_reps;
  report.limit_paths = config.limit_paths;
  report.ks_threshold_1pct = ks_two_sample_critical(
      static_cast<std::size_t>(config.n_reps),
      static_cast<std::size_t>(config.limit_paths), 0.01);

  for (const std::int64_t m : config.m_values) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    const std::int64_t horizon = m * config.horizon_mult;
    const std::int64_t lm = suppress_horizon_preset(config.lm_preset, m);
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
    std::vector<double> weight(static_cast<std::size_t>(horizon) + 1, 0.0);
    for (std::int64_t t = 1; t <= horizon; ++t)
      weight[static_cast<std::size_t>(t)] =
          config.shape.weight(static_cast<double>(t) /
                              static_cast<double>(m)) *
          inv_sqrt_m;

    std::vector<double> sups(static_cast<std::size_t>(config.n_reps));
    parallel_for(config.n_reps, config.threads, [&](std::int64_t rep) {
      DgpStream stream(
          config.dgp, CounterRng(config.seed, static_cast<std::uint64_t>(rep)));
      StreamState state(m, lm, config.var_method);
      double psum = 0.0;
      double sup = 0.0;
      for (std::int64_t t = 1; t <= horizon; ++t) {
        const double x = stream.next();
        state.update(x);
        psum += x - config.dgp.mu;
        if (t <= lm) continue;
        const double value =
            weight[static_cast<std::size_t>(t)] * std::fabs(psum) /
            state.stddev();
        if (value > sup) sup = value;
      }
      sups[static_cast<std::size_t>(rep)] = sup;
    });

    report.entries.push_back(
        {m, two_sample_ks_distance(sups, limit.values)});
  }

  report.decreasing = true;
  for (std::size_t i = 1; i < report.entries.size(); ++i)
    if (!(report.entries[i].ks_distance < report.entries[i - 1].ks_distance))
      report.decreasing = false;
  report.below_threshold_at_largest =
      report.entries.back().ks_distance < report.ks_threshold_1pct;
  return report;
}

HajekRenyiReport check_hajek_renyi(const HajekRenyiConfig& config) {
  if (!(config.gamma_tilde > 0.0 && config.gamma_tilde < 0.5))
    throw std::invalid_argument("gamma_tilde must lie in (0, 1/2)");
  if (config.m < 1 || config.n_reps < 1)
    throw std::invalid_argument("m and n_reps must be >= 1");
  if (config.c_values.empty())
    throw std::invalid_argument("need at least one C value");

  const double g = config.gamma_tilde;
  const double sigma2 = config.dgp.marginal_variance();

  std::int64_t first_t = 1;
  std::int64_t last_t = config.m - 1;
  double prefactor = std::pow(static_cast<double>(config.m), g - 0.5);
  if (config.side == HajekRenyiSide::PostMV) {
    const double mv = static_cast<double>(config.m) * config.v;
    first_t = static_cast<std::int64_t>(std::floor(mv)) + 1;
    last_t = first_t * config.tail_mult;
    prefactor = std::pow(mv, 0.5 - g);
  }
  if (last_t < first_t)
    throw std::invalid_argument("empty supremum window; increase m or tail_mult");

  std::vector<double> weight(static_cast<std::size_t>(last_t) + 1, 0.0);
  for (std::int64_t t = first_t; t <= last_t; ++t) {
    const double td = static_cast<double>(t);
    weight[static_cast<std::size_t>(t)] =
        config.side == HajekRenyiSide::PreM
            ? prefactor / std::pow(td, g)
            : prefactor / std::pow(td, 1.0 - g);
  }

  // The partial sums run over i = first_t..t, so earlier observations are
  // never drawn.
  std::vector<double> sups(static_cast<std::size_t>(config.n_reps));
  parallel_for(config.n_reps, config.threads, [&](std::int64_t rep) {
    DgpStream stream(config.dgp,
                     CounterRng(config.seed, static_cast<std::uint64_t>(rep)));
    double psum = 0.0;
    double sup = 0.0;
    for (std::int64_t t = first_t; t <= last_t; ++t) {
      psum += stream.next() - config.dgp.mu;
      const double value = weight[static_cast<std::size_t>(t)] * std::fabs(psum);
      if (value > sup) sup = value;
    }
    sups[static_cast<std::size_t>(rep)] = sup;
  });

  HajekRenyiReport report;
  report.sigma2 = sigma2;
  report.pass = true;
  for (const double c : config.c_values) {
    if (!(c > 0.0)) throw std::invalid_argument("C values must be positive");
    std::int64_t exceed = 0;
    for (const double s : sups)
      if (s > c) ++exceed;
    const double empirical =
        static_cast<double>(exceed) / static_cast<double>(config.n_reps);
    const double bound =
        config.side == HajekRenyiSide::PreM
            ? sigma2 / (c * c * (1.0 - 2.0 * g))
            : sigma2 * (1.0 + 1.0 / (1.0 - 2.0 * g)) / (c * c);
    const double se = binomial_std_error(empirical, config.n_reps);
    const bool pass = empirical <= bound + 3.0 * se;
    report.entries.push_back({c, empirical, bound, se, pass});
    if (!pass) report.pass = false;
  }
  return report;
}

}  // namespace csmon
