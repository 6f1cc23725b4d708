#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dhillon/dataset.hpp"
#include "dhillon/distribution.hpp"
#include "dhillon/mle.hpp"

namespace dhillon {

/// Objective priors. Jeffreys and the ordered reference prior share the
/// kernel 1/(beta theta); the MDIP kernel is beta theta^(1/beta).
enum class Prior { JeffreysReference, Mdip };

const char* to_string(Prior prior);

struct McmcConfig {
  int iterations = 5500;
  int burn_in = 500;
  int thin = 5;
  double a_beta = 50.0;  // Gamma proposal shapes; larger means smaller steps
  double a_theta = 50.0;
  std::uint64_t seed = 1;
  double geweke_level = 0.95;
  /// Adapt the proposal shapes during burn-in (every 100 iterations).
  bool tune = true;
  /// Starting point; defaults to initial_estimate(data).
  std::optional<DhillonParams> init;

  void validate() const;
  int retained() const { return (iterations - burn_in) / thin; }
};

struct McmcChain {
  /// Retained draws, one row per draw: column 0 beta, column 1 theta.
  Eigen::Matrix<double, Eigen::Dynamic, 2> draws;
  double accept_rate_beta = 0.0;
  double accept_rate_theta = 0.0;
  /// NaN when the diagnostic could not be computed (short or constant chain).
  double geweke_z_beta = 0.0;
  double geweke_z_theta = 0.0;
  bool passed_geweke = false;
  std::uint64_t seed = 0;
  /// Proposal shapes in force after burn-in.
  double a_beta = 0.0;
  double a_theta = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(draws.rows()); }
};

struct PosteriorSummary {
  Eigen::Vector2d median;
  Eigen::Vector2d mean;
  Eigen::Vector2d sd;
  Interval ci_beta;
  Interval ci_theta;
  double level;
};

struct ValidityReport {
  bool posterior_proper = false;
  bool beta_moments_finite = false;
  bool theta_mean_guaranteed = false;
  std::vector<std::string> messages;
};

struct PredictiveSummary {
  double mean;
  double sd;
  double median;
  Interval interval;
  double level;
};

double log_prior(Prior prior, const DhillonParams& p);

ValidityReport check_validity(Prior prior, const Dataset& d);

/// log prior + log likelihood, up to an additive constant.
double log_posterior(Prior prior, const DhillonParams& p, const Dataset& d);

/// log q(current | proposed) - log q(proposed | current) for the Gamma
/// random walk with shape `a` and mean equal to the conditioning state.
double gamma_proposal_log_ratio(double current, double proposed, double a);

/// Metropolis-Hastings acceptance probability for one block update.
double mh_acceptance(double log_target_proposed, double log_target_current, double current, double proposed,
                     double a);

using LogTarget = std::function<double(double beta, double theta)>;

/// Two-block sampler for an arbitrary positive-quadrant target. Each
/// iteration updates theta and then beta with Gamma random walks.
McmcChain run_mh(const LogTarget& log_target, const DhillonParams& init, const McmcConfig& cfg);

/// Posterior sampler; throws ImproperPosterior when check_validity refuses the
/// prior/data combination.
McmcChain run_mh(Prior prior, const Dataset& d, const McmcConfig& cfg);

/// Geweke z between the first `frac_first` and last `frac_last` of a series,
/// with Bartlett-window spectral variances (lag window 4% of each segment).
double geweke_z(std::span<const double> series, double frac_first = 0.1, double frac_last = 0.5);

PosteriorSummary summarize(const McmcChain& chain, double level = 0.95);

/// One predictive draw per retained posterior draw.
std::vector<double> posterior_predictive(const McmcChain& chain, std::uint64_t seed);
std::vector<double> posterior_predictive(const McmcChain& chain, std::span<const double> uniforms);

PredictiveSummary summarize_predictive(std::span<const double> draws, double level = 0.95);

/// Sample quantile with linear interpolation between order statistics.
double sample_quantile(std::span<const double> sorted, double prob);

// Propriety diagnostics -------------------------------------------------------

/// int_1^{theta_max} of the MDIP posterior kernel at fixed beta.
double mdip_truncated_mass(const Dataset& d, double beta, double theta_max);

/// For two observations t1 < t2: the inner theta-integral of the unnormalized
/// posterior mean of theta at fixed beta, in closed form.
double two_point_theta_mean_kernel(double beta, double t1, double t2);

}  // namespace dhillon
