#pragma once

#include <Eigen/Core>
#include <optional>
#include <utility>

#include "dhillon/dataset.hpp"
#include "dhillon/distribution.hpp"
#include "dhillon/numerics.hpp"

namespace dhillon {

/// Per-observation expected Fisher information for (beta, theta).
/// Multiply by n for the sample information.
struct FisherInfo {
  double i_bb;
  double i_bt;
  double i_tt;

  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d m;
    m << i_bb, i_bt, i_bt, i_tt;
    return m;
  }
  double determinant() const { return i_bb * i_tt - i_bt * i_bt; }
};

struct Interval {
  double lo;
  double hi;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

struct MleFit {
  DhillonParams params;
  double loglik;
  FisherInfo fisher;
  /// Inverse of the sample Fisher information n * I(beta, theta) at the estimate.
  Eigen::Matrix2d covariance;
  double se_beta;
  double se_theta;
  Interval ci_beta;
  Interval ci_theta;
  double level;
  bool converged;
  int iterations;
};

struct MomEstimate {
  std::optional<DhillonParams> params;
  double ratio;  // m2 / mean^2
  bool feasible;
};

double log_likelihood(const DhillonParams& p, const Dataset& d);

/// (dL/dbeta, dL/dtheta).
Eigen::Vector2d score(const DhillonParams& p, const Dataset& d);

/// Observed second derivatives of the log-likelihood in (beta, theta).
Eigen::Matrix2d log_likelihood_hessian(const DhillonParams& p, const Dataset& d);

FisherInfo fisher_info(const DhillonParams& p);

/// Maximum-likelihood fit with marginal Wald intervals at `level`.
///
/// Newton iterations on (log beta, log theta) with backtracking; when the
/// Hessian is not negative definite a gradient step is taken instead.
/// Starts from the moment estimate when feasible, else (1, 1 / median).
/// Throws DegenerateData (n < 2 or all times equal) and NotConverged.
MleFit fit_mle(const Dataset& d, double level = 0.95, const RootConfig& cfg = {});

/// Method of moments: solves m2 / mean^2 = tan(pi/beta) / (pi/beta) on beta > 2.
MomEstimate fit_mom(const Dataset& d);

/// Starting point shared by the optimizer and the sampler.
DhillonParams initial_estimate(const Dataset& d);

}  // namespace dhillon
