// csmon: anytime-valid monitoring of a stream's mean.
//
// Subcommands:
//   quantile   critical-value table for a boundary shape
//   monitor    stream observations -> one interval/test record per line
//   simulate   named Monte Carlo experiments
//   selftest   quick end-to-end check battery
//
// Exit codes: 0 success, 1 assertion/data failure, 2 usage error.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "csmon/boundary.hpp"
#include "csmon/cache.hpp"
#include "csmon/estimators.hpp"
#include "csmon/quantiles.hpp"
#include "csmon/sequence.hpp"
#include "csmon/simulate.hpp"
#include "csmon/stats.hpp"

namespace {

using namespace csmon;

std::string fmt_num(double v, bool full_precision) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (full_precision) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc{} || res.ptr != item.data() + item.size())
      throw CLI::ValidationError("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("empty number list");
  return out;
}

struct QuantileSource {
  std::string cache_path;
  bool no_cache = false;
  std::int64_t paths = kDefaultPaths;
  int grid = kDefaultGridSize;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;

  CriticalValue get(const BoundaryShape& shape, double alpha, Sided sided) {
    return get_many(shape, {alpha}, sided)[0];
  }

  // One shared Monte Carlo sample per sided variant for all alpha levels.
  std::vector<CriticalValue> get_many(const BoundaryShape& shape,
                                      const std::vector<double>& alphas,
                                      Sided sided) {
    if (no_cache)
      return critical_values(shape, alphas, sided, paths, grid, seed, threads);
    QuantileCache cache(cache_path.empty() ? QuantileCache::default_path()
                                           : std::filesystem::path(cache_path));
    std::vector<double> missing;
    for (const double alpha : alphas)
      if (!cache.lookup(shape.key(), alpha, sided, grid, paths, seed))
        missing.push_back(alpha);
    if (!missing.empty()) {
      for (const CriticalValue& cv :
           critical_values(shape, missing, sided, paths, grid, seed, threads))
        cache.insert(cv);
      cache.save();
    }
    std::vector<CriticalValue> out;
    out.reserve(alphas.size());
    for (const double alpha : alphas)
      out.push_back(*cache.lookup(shape.key(), alpha, sided, grid, paths, seed));
    return out;
  }

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--paths", paths, "Monte Carlo paths for critical values");
    cmd->add_option("--grid", grid, "grid size for critical values");
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
    cmd->add_option("--cache", cache_path,
                    "quantile cache file (default $CS_CACHE or "
                    "./.cs-cache/quantiles.tsv)");
    cmd->add_flag("--no-cache", no_cache, "do not read or write the cache");
  }
};

int run_quantile(const std::string& shape_spec, const std::string& alpha_list,
                 const std::string& sided_text, QuantileSource& source,
                 bool full_precision) {
  const BoundaryShape shape = parse_shape_spec(shape_spec);
  const std::vector<double> alphas = parse_double_list(alpha_list);
  std::vector<Sided> sides;
  if (sided_text == "both")
    sides = {Sided::TwoSided, Sided::OneSided};
  else
    sides = {sided_from_string(sided_text)};

  for (const double alpha : alphas)
    if (!(alpha > 0.0 && alpha < 1.0))
      throw CLI::ValidationError("alpha must lie in (0,1)");
  std::printf("alpha\tsided\tc\tstd_error\n");
  for (const Sided sided : sides)
    for (const CriticalValue& cv : source.get_many(shape, alphas, sided))
      std::printf("%s\t%s\t%s\t%s\n", fmt_num(cv.alpha, full_precision).c_str(),
                  to_string(sided).c_str(),
                  fmt_num(cv.value, full_precision).c_str(),
                  fmt_num(cv.std_error, full_precision).c_str());
  return 0;
}

std::optional<double> parse_observation(const std::string& line) {
  // First CSV field, or the whole trimmed line.
  std::size_t end = line.find(',');
  if (end == std::string::npos) end = line.size();
  std::size_t begin = 0;
  while (begin < end && std::isspace(static_cast<unsigned char>(line[begin])))
    ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(line[end - 1])))
    --end;
  if (begin == end) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(line.data() + begin, line.data() + end, v);
  if (res.ec != std::errc{} || res.ptr != line.data() + end)
    return std::nullopt;
  return v;
}

int run_monitor(const std::string& shape_spec, double alpha, std::int64_t m,
                const std::string& lm_spec, const std::string& variance,
                const std::string& mu0_list, const std::string& side_text,
                const std::string& input_path, bool strict,
                QuantileSource& source, bool full_precision) {
  const BoundaryShape shape = parse_shape_spec(shape_spec);
  if (!(alpha > 0.0 && alpha < 1.0))
    throw CLI::ValidationError("alpha must lie in (0,1)");
  const std::int64_t lm = suppress_horizon_preset(lm_spec, m);
  VarianceMethod method;
  if (variance == "iid")
    method = VarianceMethod::IidSample;
  else if (variance == "bartlett")
    method = VarianceMethod::BartlettLongRun;
  else
    throw CLI::ValidationError("--variance must be iid or bartlett");

  std::vector<double> mu0s;
  if (!mu0_list.empty()) mu0s = parse_double_list(mu0_list);
  Direction direction = Direction::TwoSided;
  if (side_text == "right")
    direction = Direction::Right;
  else if (side_text == "left")
    direction = Direction::Left;
  else if (side_text != "two")
    throw CLI::ValidationError("--side must be two, right or left");

  const CriticalValue c = source.get(shape, alpha, Sided::TwoSided);
  std::optional<CriticalValue> c_one;
  if (!mu0s.empty() && direction != Direction::TwoSided)
    c_one = source.get(shape, alpha, Sided::OneSided);

  std::ifstream file;
  if (!input_path.empty() && input_path != "-") {
    file.open(input_path);
    if (!file) {
      std::fprintf(stderr, "csmon: cannot open input '%s'\n",
                   input_path.c_str());
      return 1;
    }
  }
  std::istream& in = file.is_open() ? file : std::cin;

  StreamState state(m, lm, method);
  std::string line;
  std::string out;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto obs = parse_observation(line);
    if (!obs) {
      if (strict) {
        std::fprintf(stderr, "csmon: unparseable line %lld: '%s'\n",
                     static_cast<long long>(line_no), line.c_str());
        return 1;
      }
      std::fprintf(stderr, "csmon: skipping unparseable line %lld\n",
                   static_cast<long long>(line_no));
      continue;
    }
    state.update(*obs);
    const IntervalRecord rec = interval(state, shape, c);
    out.clear();
    out += "{\"t\":";
    out += std::to_string(rec.t);
    out += ",\"mean\":";
    out += fmt_num(rec.mean, full_precision);
    out += ",\"sigma\":";
    out += fmt_num(rec.sigma, full_precision);
    out += ",\"lower\":";
    out += fmt_num(rec.lower, full_precision);
    out += ",\"upper\":";
    out += fmt_num(rec.upper, full_precision);
    out += ",\"rejects\":[";
    for (std::size_t i = 0; i < mu0s.size(); ++i) {
      const bool reject =
          direction == Direction::TwoSided
              ? test_two_sided(state, shape, c, mu0s[i]).reject
              : test_one_sided(state, shape, *c_one, mu0s[i], direction).reject;
      if (i > 0) out += ',';
      out += reject ? "true" : "false";
    }
    out += "]}\n";
    std::fwrite(out.data(), 1, out.size(), stdout);
  }
  return 0;
}

// --- simulate ---------------------------------------------------------

struct SimulateArgs {
  std::string experiment;
  std::string dgp_name = "normal";
  double mu = 0.0;
  double sigma = 1.0;
  double rate = 1.0;
  double phi = 0.5;
  double g1 = 0.0;
  double g2 = 0.25;
  double alpha = 0.05;
  std::int64_t m = 0;  // 0: per-experiment default
  std::int64_t horizon = 0;
  std::string lm_spec;  // empty: per-experiment default
  std::string variance = "iid";
  double mu0 = 0.0;
  bool mu0_set = false;
  std::string mus_list;
  std::string mode_text = "right";
  std::string m_list = "100,400,1600";
  double gamma_tilde = 0.25;
  std::string c_list = "2,4,8";
  std::string hr_side = "pre";
  double hr_v = 1.0;
  std::int64_t reps = 0;  // 0: per-experiment default
  std::int64_t limit_paths = kDefaultPaths;
  bool json = false;
  bool check = false;
};

DataGeneratingProcess make_dgp(const SimulateArgs& a) {
  if (a.dgp_name == "normal")
    return DataGeneratingProcess::iid_normal(a.mu, a.sigma);
  if (a.dgp_name == "exp")
    return DataGeneratingProcess::centered_exponential(a.rate, a.mu);
  if (a.dgp_name == "ar1")
    return DataGeneratingProcess::ar1(a.phi, a.sigma, a.mu);
  throw CLI::ValidationError("--dgp must be normal, exp or ar1");
}

nlohmann::json report_to_json(const SimReport& r) {
  nlohmann::json j;
  j["experiment"] = r.experiment;
  j["n_reps"] = r.n_reps;
  j["horizon"] = r.horizon;
  j["estimate"] = r.estimate;
  j["binomial_se"] = r.binomial_se;
  if (!r.stopping_time_quantiles.empty()) {
    nlohmann::json q = nlohmann::json::object();
    for (const auto& [level, value] : r.stopping_time_quantiles)
      q[fmt_num(level, true)] = value;
    j["stopping_time_quantiles"] = q;
  }
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [k, v] : r.config) cfg[k] = v;
  j["config"] = cfg;
  nlohmann::json det = nlohmann::json::object();
  for (const auto& [k, v] : r.details) det[k] = v;
  j["details"] = det;
  if (r.has_assertion) {
    j["assertion"] = r.assertion_text;
    j["assertion_pass"] = r.assertion_pass;
  }
  return j;
}

int finish_report(const SimReport& report, bool json, bool check) {
  if (json)
    std::printf("%s\n", report_to_json(report).dump().c_str());
  else
    std::fputs(to_kv_text(report).c_str(), stdout);
  if (check && report.has_assertion && !report.assertion_pass) return 1;
  return 0;
}

int run_simulate(SimulateArgs& a, QuantileSource& source) {
  const BoundaryShape shape = BoundaryShape::canonical(a.g1, a.g2);
  // Monitoring experiments default to log-suppression of the earliest
  // times; the sup-statistic check defaults to no suppression.
  const auto lm_or = [&a](const char* fallback) {
    return a.lm_spec.empty() ? std::string(fallback) : a.lm_spec;
  };

  if (a.experiment == "coverage") {
    CoverageConfig cfg;
    cfg.dgp = make_dgp(a);
    cfg.shape = shape;
    cfg.alpha = a.alpha;
    cfg.m = a.m > 0 ? a.m : 1600;
    cfg.horizon = a.horizon;
    cfg.suppress_horizon = suppress_horizon_preset(lm_or("log"), cfg.m);
    cfg.var_method = a.variance == "bartlett" ? VarianceMethod::BartlettLongRun
                                              : VarianceMethod::IidSample;
    cfg.n_reps = a.reps > 0 ? a.reps : 2000;
    cfg.seed = source.seed;
    cfg.threads = source.threads;
    cfg.c = source.get(shape, a.alpha, Sided::TwoSided);
    return finish_report(simulate_coverage(cfg), a.json, a.check);
  }
  if (a.experiment == "rejection") {
    RejectionConfig cfg;
    cfg.dgp = make_dgp(a);
    cfg.mu0 = a.mu0_set ? a.mu0 : cfg.dgp.mu - 0.5;
    cfg.shape = shape;
    cfg.alpha = a.alpha;
    cfg.m = a.m > 0 ? a.m : 200;
    cfg.horizon = a.horizon;
    cfg.suppress_horizon = suppress_horizon_preset(lm_or("log"), cfg.m);
    cfg.var_method = a.variance == "bartlett" ? VarianceMethod::BartlettLongRun
                                              : VarianceMethod::IidSample;
    cfg.n_reps = a.reps > 0 ? a.reps : 1000;
    cfg.seed = source.seed;
    cfg.threads = source.threads;
    cfg.c = source.get(shape, a.alpha, Sided::TwoSided);
    return finish_report(simulate_rejection(cfg), a.json, a.check);
  }
  if (a.experiment == "fwer") {
    FwerConfig cfg;
    cfg.dgp = make_dgp(a);
    if (a.mus_list.empty()) {
      for (int i = 0; i < 10; ++i)
        cfg.mus.push_back(cfg.dgp.mu + 0.25 * i);
    } else {
      cfg.mus = parse_double_list(a.mus_list);
    }
    if (a.mode_text == "right")
      cfg.mode = BatteryMode::RightOnly;
    else if (a.mode_text == "left")
      cfg.mode = BatteryMode::LeftOnly;
    else if (a.mode_text == "both")
      cfg.mode = BatteryMode::Both;
    else
      throw CLI::ValidationError("--mode must be right, left or both");
    cfg.shape = shape;
    cfg.alpha = a.alpha;
    cfg.m = a.m > 0 ? a.m : 1600;
    cfg.horizon = a.horizon;
    cfg.suppress_horizon = suppress_horizon_preset(lm_or("log"), cfg.m);
    cfg.n_reps = a.reps > 0 ? a.reps : 2000;
    cfg.seed = source.seed;
    cfg.threads = source.threads;
    cfg.c = source.get(shape, a.alpha,
                       cfg.mode == BatteryMode::Both ? Sided::TwoSided
                                                     : Sided::OneSided);
    return finish_report(simulate_fwer(cfg), a.json, a.check);
  }
  if (a.experiment == "supstat") {
    SupStatConfig cfg;
    cfg.dgp = make_dgp(a);
    cfg.shape = shape;
    const auto ms = parse_double_list(a.m_list);
    cfg.m_values.clear();
    for (double m : ms) cfg.m_values.push_back(static_cast<std::int64_t>(m));
    cfg.horizon_mult = a.horizon > 0 ? a.horizon : 100;
    cfg.lm_preset = lm_or("1");
    cfg.var_method = a.variance == "bartlett" ? VarianceMethod::BartlettLongRun
                                              : VarianceMethod::IidSample;
    cfg.n_reps = a.reps > 0 ? a.reps : 2000;
    cfg.limit_paths = a.limit_paths;
    cfg.grid_n = source.grid;
    cfg.seed = source.seed;
    cfg.threads = source.threads;
    const SupStatReport rep = check_sup_statistic(cfg);

    SimReport out;
    out.experiment = "supstat";
    out.n_reps = cfg.n_reps;
    out.horizon = cfg.horizon_mult;
    out.estimate = rep.entries.back().ks_distance;
    out.binomial_se = 0.0;
    out.config.emplace_back("dgp", cfg.dgp.name());
    out.config.emplace_back("shape", cfg.shape.key());
    out.config.emplace_back("variance",
                            cfg.var_method == VarianceMethod::BartlettLongRun
                                ? "bartlett"
                                : "iid");
    out.config.emplace_back("lm", cfg.lm_preset);
    out.config.emplace_back("seed", std::to_string(cfg.seed));
    for (const auto& e : rep.entries)
      out.details.emplace_back("ks_m" + std::to_string(e.m), e.ks_distance);
    out.details.emplace_back("ks_threshold_1pct", rep.ks_threshold_1pct);
    out.details.emplace_back("decreasing", rep.decreasing ? 1.0 : 0.0);
    out.has_assertion = true;
    out.assertion_pass = rep.decreasing && rep.below_threshold_at_largest;
    out.assertion_text =
        "KS decreasing in m and below the 1% threshold at the largest m";
    return finish_report(out, a.json, a.check);
  }
  if (a.experiment == "hajekrenyi") {
    HajekRenyiConfig cfg;
    cfg.dgp = make_dgp(a);
    cfg.gamma_tilde = a.gamma_tilde;
    cfg.m = a.m > 0 ? a.m : 100;
    cfg.v = a.hr_v;
    cfg.c_values = parse_double_list(a.c_list);
    if (a.hr_side == "pre")
      cfg.side = HajekRenyiSide::PreM;
    else if (a.hr_side == "post")
      cfg.side = HajekRenyiSide::PostMV;
    else
      throw CLI::ValidationError("--hr-side must be pre or post");
    cfg.n_reps = a.reps > 0 ? a.reps : 5000;
    cfg.seed = source.seed;
    cfg.threads = source.threads;
    const HajekRenyiReport rep = check_hajek_renyi(cfg);

    SimReport out;
    out.experiment = "hajekrenyi";
    out.n_reps = cfg.n_reps;
    out.horizon = cfg.m;
    out.estimate = rep.entries.front().empirical;
    out.binomial_se = rep.entries.front().std_error;
    out.config.emplace_back("dgp", cfg.dgp.name());
    out.config.emplace_back("gamma_tilde", fmt_num(cfg.gamma_tilde, true));
    out.config.emplace_back("side", a.hr_side);
    out.config.emplace_back("m", std::to_string(cfg.m));
    out.config.emplace_back("seed", std::to_string(cfg.seed));
    for (const auto& e : rep.entries) {
      out.details.emplace_back("exceedance_C" + fmt_num(e.c, true),
                               e.empirical);
      out.details.emplace_back("bound_C" + fmt_num(e.c, true), e.bound);
    }
    out.has_assertion = true;
    out.assertion_pass = rep.pass;
    out.assertion_text = "empirical exceedance <= bound + 3*binomial_se";
    return finish_report(out, a.json, a.check);
  }
  if (a.experiment == "prop43") {
    const std::int64_t paths = a.reps > 0 ? a.reps : 100000;
    const PathGrid grid = PathGrid::with_endpoint_clusters(source.grid);
    const SupSample bridge =
        sample_bridge_sup(a.g1, a.g2, grid, paths, source.seed,
                          Sided::TwoSided, source.threads);
    const SupSample wiener =
        sample_wiener_sup(shape, default_y_max(shape), source.grid, paths,
                          source.seed + 1, Sided::TwoSided, source.threads);
    const double ks = two_sample_ks_distance(bridge.values, wiener.values);
    const double threshold = ks_two_sample_critical(
        bridge.values.size(), wiener.values.size(), 0.01);

    SimReport out;
    out.experiment = "prop43";
    out.n_reps = paths;
    out.horizon = 0;
    out.estimate = ks;
    out.binomial_se = 0.0;
    out.config.emplace_back("shape", shape.key());
    out.config.emplace_back("grid", std::to_string(source.grid));
    out.config.emplace_back("seed", std::to_string(source.seed));
    out.details.emplace_back("ks_distance", ks);
    out.details.emplace_back("ks_threshold_1pct", threshold);
    out.has_assertion = true;
    out.assertion_pass = ks < threshold;
    out.assertion_text =
        "bridge and Wiener sup samples agree (two-sample KS, 1% level)";
    return finish_report(out, a.json, a.check);
  }
  std::fprintf(stderr, "csmon: unknown experiment '%s'\n",
               a.experiment.c_str());
  return 2;
}

// --- selftest ---------------------------------------------------------

struct SelfCheck {
  std::string name;
  bool pass;
};

int run_selftest(bool full, std::uint64_t seed, int threads) {
  std::vector<SelfCheck> checks;
  const std::int64_t paths = full ? kDefaultPaths : 20000;
  const int grid_n = full ? kDefaultGridSize : 2048;

  {
    const auto shape = BoundaryShape::canonical(0.0, 0.0);
    const CriticalValue two =
        critical_value(shape, 0.05, Sided::TwoSided, paths, grid_n, seed,
                       threads);
    const CriticalValue one =
        critical_value(shape, 0.05, Sided::OneSided, paths, grid_n, seed,
                       threads);
    const double tol = full ? 0.012 : 0.03;
    checks.push_back({"critical value vs analytic series (two-sided)",
                      std::fabs(two.value -
                                kolmogorov_series_quantile(0.05,
                                                           Sided::TwoSided)) <
                          tol});
    checks.push_back({"critical value vs analytic series (one-sided)",
                      std::fabs(one.value -
                                kolmogorov_series_quantile(0.05,
                                                           Sided::OneSided)) <
                          tol});
  }
  {
    const auto shape = BoundaryShape::canonical(0.25, 0.0);
    const PathGrid grid = PathGrid::with_endpoint_clusters(grid_n);
    const SupSample bridge = sample_bridge_sup(0.25, 0.0, grid, paths, seed,
                                               Sided::TwoSided, threads);
    const SupSample wiener =
        sample_wiener_sup(shape, default_y_max(shape), grid_n, paths, seed + 1,
                          Sided::TwoSided, threads);
    const double ks = two_sample_ks_distance(bridge.values, wiener.values);
    checks.push_back(
        {"bridge/Wiener distributional match",
         ks < ks_two_sample_critical(bridge.values.size(),
                                     wiener.values.size(), 0.01)});
  }
  {
    bool ok = true;
    for (const auto& [g1, g2] : {std::pair{0.0, 0.0}, std::pair{0.4, 0.4}}) {
      const auto shape = BoundaryShape::canonical(g1, g2);
      for (const double alpha : {0.01, 0.05, 0.1}) {
        const auto two = critical_value(shape, alpha, Sided::TwoSided, paths,
                                        grid_n, seed, threads);
        const auto one = critical_value(shape, alpha, Sided::OneSided, paths,
                                        grid_n, seed, threads);
        const auto half = critical_value(shape, alpha / 2.0, Sided::OneSided,
                                         paths, grid_n, seed, threads);
        ok = ok && one.value <= two.value && two.value <= half.value;
      }
    }
    checks.push_back({"one/two-sided quantile sandwich on shared paths", ok});
  }
  {
    // Determinism, including across worker counts.
    const PathGrid grid = PathGrid::with_endpoint_clusters(512);
    const SupSample a =
        sample_bridge_sup(0.25, 0.25, grid, 4000, seed, Sided::TwoSided, 1);
    const SupSample b =
        sample_bridge_sup(0.25, 0.25, grid, 4000, seed, Sided::TwoSided, 4);
    checks.push_back({"sampler determinism across worker counts",
                      a.values == b.values});
  }
  {
    const auto shape = BoundaryShape::canonical(0.0, 0.25);
    const CriticalValue c = critical_value(shape, 0.05, Sided::TwoSided, paths,
                                           grid_n, seed, threads);
    CoverageConfig cov;
    cov.dgp = DataGeneratingProcess::iid_normal(0.0, 1.0);
    cov.shape = shape;
    cov.c = c;
    cov.m = full ? 1600 : 200;
    cov.horizon = full ? 0 : 10 * cov.m;
    cov.n_reps = full ? 2000 : 200;
    cov.seed = seed;
    cov.threads = threads;
    const SimReport r = simulate_coverage(cov);
    checks.push_back({"uniform coverage near 1-alpha",
                      full ? r.assertion_pass : r.estimate >= 0.85});

    RejectionConfig rej;
    rej.dgp = DataGeneratingProcess::iid_normal(0.5, 1.0);
    rej.mu0 = 0.0;
    rej.shape = shape;
    rej.c = c;
    rej.m = full ? 200 : 100;
    rej.n_reps = full ? 1000 : 200;
    rej.seed = seed;
    rej.threads = threads;
    const SimReport rr = simulate_rejection(rej);
    checks.push_back(
        {"rejection under a 0.5-sigma shift",
         full ? rr.assertion_pass : rr.estimate >= 0.95});

    RejectionConfig size_cfg = rej;
    size_cfg.dgp = DataGeneratingProcess::iid_normal(0.0, 1.0);
    size_cfg.mu0 = 0.0;
    const SimReport rs = simulate_rejection(size_cfg);
    checks.push_back({"size under the null", rs.assertion_pass});

    FwerConfig fw;
    fw.dgp = DataGeneratingProcess::iid_normal(0.0, 1.0);
    for (int i = 0; i < 10; ++i) fw.mus.push_back(0.25 * i);
    fw.shape = shape;
    fw.c = critical_value(shape, 0.05, Sided::OneSided, paths, grid_n, seed,
                          threads);
    fw.m = full ? 1600 : 200;
    fw.n_reps = full ? 2000 : 300;
    fw.seed = seed;
    fw.threads = threads;
    const SimReport rf = simulate_fwer(fw);
    checks.push_back({"FWER of the hierarchical battery",
                      full ? rf.assertion_pass
                           : (rf.estimate <= 0.10 &&
                              rf.details.back().second == 0.0)});
  }
  {
    HajekRenyiConfig hr;
    hr.dgp = DataGeneratingProcess::iid_normal(0.0, 1.0);
    hr.gamma_tilde = 0.25;
    hr.m = 100;
    hr.n_reps = full ? 5000 : 2000;
    hr.seed = seed;
    hr.threads = threads;
    hr.side = HajekRenyiSide::PreM;
    const bool pre = check_hajek_renyi(hr).pass;
    hr.side = HajekRenyiSide::PostMV;
    const bool post = check_hajek_renyi(hr).pass;
    checks.push_back({"weighted maximal-inequality bounds", pre && post});
  }
  {
    SupStatConfig ss;
    ss.dgp = DataGeneratingProcess::iid_normal(0.0, 1.0);
    ss.shape = BoundaryShape::canonical(0.0, 0.25);
    ss.m_values = full ? std::vector<std::int64_t>{100, 400, 1600}
                       : std::vector<std::int64_t>{100, 400};
    ss.n_reps = full ? 2000 : 500;
    ss.limit_paths = paths;
    ss.grid_n = grid_n;
    ss.seed = seed;
    ss.threads = threads;
    const SupStatReport rep = check_sup_statistic(ss);
    checks.push_back(
        {"sup-statistic convergence to the limit law",
         full ? rep.decreasing && rep.below_threshold_at_largest
              : rep.decreasing});
  }

  bool all = true;
  for (const auto& check : checks) {
    std::printf("[%s] %s\n", check.pass ? "PASS" : "FAIL", check.name.c_str());
    all = all && check.pass;
  }
  std::printf("%s\n", all ? "selftest: all checks passed"
                          : "selftest: FAILURES present");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anytime-valid confidence sequences and sequential tests"};
  app.require_subcommand(1);

  // quantile
  auto* q = app.add_subcommand("quantile", "critical-value table");
  std::string q_shape = "canonical:g1=0,g2=0";
  std::string q_alpha = "0.05";
  std::string q_sided = "two";
  bool q_full = false;
  QuantileSource q_source;
  q->add_option("--shape", q_shape, "boundary shape spec");
  q->add_option("--alpha", q_alpha, "comma-separated alpha levels");
  q->add_option("--sided", q_sided, "two, one or both");
  q->add_flag("--full-precision", q_full, "shortest round-trip numbers");
  q_source.add_flags(q);

  // monitor
  auto* mon = app.add_subcommand("monitor", "stream monitoring");
  std::string mon_shape = "canonical:g1=0,g2=0.25";
  double mon_alpha = 0.05;
  std::int64_t mon_m = 0;
  std::string mon_lm = "1";
  std::string mon_var = "iid";
  std::string mon_mu0;
  std::string mon_side = "two";
  std::string mon_input;
  bool mon_strict = false;
  bool mon_full = false;
  QuantileSource mon_source;
  mon->add_option("--shape", mon_shape, "boundary shape spec");
  mon->add_option("--alpha", mon_alpha, "confidence level alpha");
  mon->add_option("--m", mon_m, "burn-in scale m")->required();
  mon->add_option("--lm", mon_lm, "suppression horizon: 1, log, sqrt or int");
  mon->add_option("--variance", mon_var, "iid or bartlett");
  mon->add_option("--mu0", mon_mu0, "comma-separated test means");
  mon->add_option("--side", mon_side, "two, right or left");
  mon->add_option("--input", mon_input, "input file ('-' = stdin)");
  mon->add_flag("--strict", mon_strict, "abort on unparseable lines");
  mon->add_flag("--full-precision", mon_full, "shortest round-trip numbers");
  mon_source.add_flags(mon);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo experiments");
  SimulateArgs sa;
  QuantileSource sim_source;
  sim->add_option("experiment", sa.experiment,
                  "coverage|rejection|fwer|supstat|hajekrenyi|prop43")
      ->required();
  sim->add_option("--dgp", sa.dgp_name, "normal, exp or ar1");
  sim->add_option("--mu", sa.mu, "DGP mean");
  sim->add_option("--sigma", sa.sigma, "normal / innovation sigma");
  sim->add_option("--rate", sa.rate, "exponential rate");
  sim->add_option("--phi", sa.phi, "AR(1) coefficient");
  sim->add_option("--g1", sa.g1, "shape exponent gamma1");
  sim->add_option("--g2", sa.g2, "shape exponent gamma2");
  sim->add_option("--alpha", sa.alpha, "level alpha");
  sim->add_option("--m", sa.m, "burn-in scale");
  sim->add_option("--horizon", sa.horizon,
                  "observations per replication (supstat: multiple of m)");
  sim->add_option("--lm", sa.lm_spec, "suppression horizon preset");
  sim->add_option("--variance", sa.variance, "iid or bartlett");
  sim->add_option("--mu0", sa.mu0, "tested mean (rejection)")
      ->each([&sa](const std::string&) { sa.mu0_set = true; });
  sim->add_option("--mus", sa.mus_list, "battery grid (fwer)");
  sim->add_option("--mode", sa.mode_text, "right, left or both (fwer)");
  sim->add_option("--m-list", sa.m_list, "m sweep (supstat)");
  sim->add_option("--gamma-tilde", sa.gamma_tilde, "exponent (hajekrenyi)");
  sim->add_option("--C", sa.c_list, "thresholds (hajekrenyi)");
  sim->add_option("--hr-side", sa.hr_side, "pre or post (hajekrenyi)");
  sim->add_option("--V", sa.hr_v, "window start multiplier (hajekrenyi)");
  sim->add_option("--reps", sa.reps, "replications (prop43: paths)");
  sim->add_option("--limit-paths", sa.limit_paths,
                  "limit-law sample size (supstat)");
  sim->add_flag("--json", sa.json, "machine-readable JSON report");
  sim->add_flag("--check", sa.check,
                "exit 1 unless the built-in assertion passes");
  sim_source.add_flags(sim);

  // selftest
  auto* st = app.add_subcommand("selftest", "quick end-to-end checks");
  bool st_full = false;
  std::uint64_t st_seed = kDefaultSeed;
  int st_threads = 0;
  st->add_flag("--full", st_full, "acceptance-scale scale (slow)");
  st->add_option("--seed", st_seed, "RNG seed");
  st->add_option("--threads", st_threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (q->parsed())
      return run_quantile(q_shape, q_alpha, q_sided, q_source, q_full);
    if (mon->parsed())
      return run_monitor(mon_shape, mon_alpha, mon_m, mon_lm, mon_var, mon_mu0,
                         mon_side, mon_input, mon_strict, mon_source, mon_full);
    if (sim->parsed()) return run_simulate(sa, sim_source);
    if (st->parsed()) return run_selftest(st_full, st_seed, st_threads);
  } catch (const ShapeParseError& e) {
    std::fprintf(stderr, "csmon: bad shape field '%s': %s\n", e.field.c_str(),
                 e.what());
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "csmon: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "csmon: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "csmon: %s\n", e.what());
    return 1;
  }
  return 2;
}
