#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dhillon/bayes.hpp"
#include "dhillon/distribution.hpp"
#include "dhillon/mle.hpp"

namespace dhillon {

enum class Estimator { MM, MLE, Bayes };
enum class Parameter { Beta, Theta };

const char* to_string(Estimator e);
const char* to_string(Parameter p);

struct SimScenario {
  DhillonParams truth{4.0, 2.0};
  std::vector<int> n_values{20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120};
  int replicates = 1000;
  McmcConfig mcmc;
  double ci_level = 0.95;
  std::uint64_t root_seed = 1;
  /// Worker threads; 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
  /// Chain attempts per replicate before a Geweke failure is final.
  int geweke_attempts = 3;

  void validate() const;
};

/// One estimator's output for one replicate.
struct PointEstimate {
  Eigen::Vector2d value;  // (beta, theta)
  std::optional<Interval> ci_beta;
  std::optional<Interval> ci_theta;
};

struct ReplicateOutcome {
  /// Indexed by Estimator; empty when that estimator failed on the replicate.
  std::array<std::optional<PointEstimate>, 3> estimates;
  bool mom_infeasible = false;
  bool mle_not_converged = false;
  bool geweke_failed = false;
  /// Extra chains run because an earlier attempt failed the diagnostic.
  int geweke_reruns = 0;
};

/// Estimates for one simulated sample. `seed` is the replicate's own seed;
/// implementations derive any further streams from it.
using ReplicateEstimator =
    std::function<ReplicateOutcome(const Dataset& sample, std::uint64_t seed, const SimScenario& s)>;

/// MoM, MLE with Wald intervals, and the Jeffreys/reference posterior median
/// with an equal-tail credible interval.
ReplicateOutcome default_replicate_estimator(const Dataset& sample, std::uint64_t seed, const SimScenario& s);

struct SimRow {
  Estimator estimator;
  Parameter parameter;
  int n;
  double bias;
  double mse;
  std::optional<double> cp;  // absent for MM
  int used;                  // replicates contributing
};

struct SimCounts {
  int n;
  int mom_infeasible = 0;
  int mle_not_converged = 0;
  int geweke_fail = 0;
  int geweke_reruns = 0;
};

struct SimReport {
  std::vector<SimRow> rows;
  std::vector<SimCounts> counts;

  const SimRow* find(Estimator e, Parameter p, int n) const;
};

/// Throws EmptyInput on an empty list.
std::pair<double, double> bias_mse(std::span<const double> estimates, double truth);

/// Replicate r at grid position k uses the sample seed derive_seed(root, {k, r}),
/// so the report does not depend on scheduling or thread count.
SimReport run_scenario(const SimScenario& s, const ReplicateEstimator& estimator = default_replicate_estimator);

/// CSV with header estimator,parameter,n,bias,mse,cp (cp empty for MM).
std::string sim_report_csv(const SimReport& r);

/// Rows grouped by parameter and n; columns MM (Bias, MSE), MLE and Bayes
/// (Bias, MSE, CP in percent).
std::string sim_report_table(const SimReport& r);

}  // namespace dhillon
