#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "csmon/boundary.hpp"
#include "csmon/estimators.hpp"
#include "csmon/quantiles.hpp"
#include "csmon/rng.hpp"
#include "csmon/sequence.hpp"

namespace csmon {

struct DataGeneratingProcess {
  enum class Kind { IidNormal, IidCenteredExponential, Ar1 };

  Kind kind = Kind::IidNormal;
  double mu = 0.0;     // declared mean of every variant
  double sigma = 1.0;  // normal std dev / AR(1) innovation std dev
  double rate = 1.0;   // exponential rate
  double phi = 0.0;    // AR(1) coefficient, |phi| < 1

  static DataGeneratingProcess iid_normal(double mu, double sigma);
  static DataGeneratingProcess centered_exponential(double rate, double mu);
  static DataGeneratingProcess ar1(double phi, double innovation_sigma,
                                   double mu);

  double marginal_variance() const;
  double long_run_variance() const;
  std::string name() const;
};

// Sequential draws from one replication substream.
class DgpStream {
 public:
  DgpStream(const DataGeneratingProcess& dgp, CounterRng rng)
      : dgp_(dgp), rng_(rng) {}
  double next();

 private:
  DataGeneratingProcess dgp_;
  CounterRng rng_;
  double ar_state_ = 0.0;
  bool ar_started_ = false;
};

struct SimReport {
  std::string experiment;
  std::int64_t n_reps = 0;
  std::int64_t horizon = 0;
  double estimate = 0.0;  // coverage / rejection / FWER rate
  double binomial_se = 0.0;
  std::vector<std::pair<double, double>> stopping_time_quantiles;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, double>> details;
  bool has_assertion = false;
  bool assertion_pass = false;
  std::string assertion_text;
};

// Line-oriented key=value rendering; numbers in shortest round-trip form so
// equal reports serialize identically.
std::string to_kv_text(const SimReport& report);

struct CoverageConfig {
  DataGeneratingProcess dgp;
  BoundaryShape shape = BoundaryShape::canonical(0.0, 0.25);
  CriticalValue c;  // two-sided
  double alpha = 0.05;
  std::int64_t m = 1600;
  std::int64_t horizon = 0;            // 0: 100*m
  std::int64_t suppress_horizon = -1;  // -1: ceil(log m)
  VarianceMethod var_method = VarianceMethod::IidSample;
  std::int64_t n_reps = 2000;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
};

// Uniform coverage by the horizon: fraction of replications whose interval
// contains the true mean at every monitored time. Truncation makes the
// reported non-coverage a lower bound on its infinite-horizon value.
SimReport simulate_coverage(const CoverageConfig& config);

struct RejectionConfig {
  DataGeneratingProcess dgp;  // stream mean is dgp.mu
  double mu0 = 0.0;           // tested null
  BoundaryShape shape = BoundaryShape::canonical(0.0, 0.25);
  CriticalValue c;  // two-sided
  double alpha = 0.05;
  std::int64_t m = 200;
  std::int64_t horizon = 0;            // 0: 50*m
  std::int64_t suppress_horizon = -1;  // -1: ceil(log m)
  VarianceMethod var_method = VarianceMethod::IidSample;
  std::int64_t n_reps = 1000;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
};

// Rejection-by-horizon rate of the two-sided test of mu0, with stopping-time
// quantiles over the rejecting replications.
SimReport simulate_rejection(const RejectionConfig& config);

struct FwerConfig {
  DataGeneratingProcess dgp;
  std::vector<double> mus;  // strictly increasing grid
  BatteryMode mode = BatteryMode::RightOnly;
  BoundaryShape shape = BoundaryShape::canonical(0.0, 0.25);
  CriticalValue c;  // one-sided for RightOnly/LeftOnly, two-sided for Both
  double alpha = 0.05;
  std::int64_t m = 1600;
  std::int64_t horizon = 0;            // 0: 50*m
  std::int64_t suppress_horizon = -1;  // -1: ceil(log m)
  VarianceMethod var_method = VarianceMethod::IidSample;
  std::int64_t n_reps = 2000;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
};

// Family-wise error rate over the battery and horizon: fraction of
// replications with any rejection of a true null. Every firing is
// cross-checked against hierarchical_battery; details report the audited
// prefix-structure violations (always 0) alongside the dominant-event count.
SimReport simulate_fwer(const FwerConfig& config);

struct SupStatConfig {
  DataGeneratingProcess dgp;  // statistic centers at dgp.mu
  BoundaryShape shape = BoundaryShape::canonical(0.0, 0.25);
  std::vector<std::int64_t> m_values = {100, 400, 1600};
  std::int64_t horizon_mult = 100;
  std::string lm_preset = "1";  // no suppression: the asymptotics' own convention
  VarianceMethod var_method = VarianceMethod::IidSample;
  std::int64_t n_reps = 2000;
  std::int64_t limit_paths = kDefaultPaths;
  int grid_n = kDefaultGridSize;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
};

struct SupStatReport {
  struct Entry {
    std::int64_t m;
    double ks_distance;
  };
  std::vector<Entry> entries;
  double ks_threshold_1pct = 0.0;
  bool decreasing = false;
  bool below_threshold_at_largest = false;
  std::int64_t n_reps = 0;
  std::int64_t limit_paths = 0;
};

// Distributional convergence of the finite-sample weighted sup statistic to
// the limiting supremum: two-sample KS distance against a Monte Carlo sample
// of the limit, per burn-in scale. Replications share substreams across the
// m sweep (common random numbers), so the distances are comparable.
SupStatReport check_sup_statistic(const SupStatConfig& config);

enum class HajekRenyiSide { PreM, PostMV };

struct HajekRenyiConfig {
  DataGeneratingProcess dgp;  // centered at dgp.mu in the sums
  double gamma_tilde = 0.25;
  std::int64_t m = 100;
  double v = 1.0;  // PostMV window start is floor(m*v)
  std::vector<double> c_values = {2.0, 4.0, 8.0};
  HajekRenyiSide side = HajekRenyiSide::PreM;
  std::int64_t tail_mult = 50;  // PostMV truncation at floor(m*v)*tail_mult
  std::int64_t n_reps = 5000;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
};

struct HajekRenyiReport {
  struct Entry {
    double c;
    double empirical;
    double bound;
    double std_error;
    bool pass;
  };
  std::vector<Entry> entries;
  bool pass = false;
  double sigma2 = 0.0;
};

// Empirical exceedance of the weighted partial-sum supremum against its
// maximal-inequality bound: sigma^2 / (C^2 (1-2g)) before the burn-in window
// and sigma^2 (1 + 1/(1-2g)) / C^2 after it. The PostMV supremum is
// truncated, which can only lower the empirical rate.
HajekRenyiReport check_hajek_renyi(const HajekRenyiConfig& config);

}  // namespace csmon
