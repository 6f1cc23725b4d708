#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <utility>

namespace dhillon {

using ScalarFn = std::function<double(double)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct RootConfig {
  double abs_tol = 1e-12;
  int max_iter = 200;
  std::optional<std::pair<double, double>> bracket;

  /// Throws DomainError when the invariants do not hold.
  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  bool converged = false;
};

/// Root of f inside cfg.bracket. Secant steps are guarded by a bisection
/// bracket that is maintained throughout, so iterates never leave it.
///
/// Without a bracket, one is searched for by doubling [-1, 1] outward.
/// Throws NoBracket when f does not change sign, MaxIterExceeded when the
/// bracket has not collapsed below abs_tol within max_iter evaluations.
double find_root(const ScalarFn& f, const RootConfig& cfg);

/// Same contract, Newton steps using the supplied derivative.
double find_root(const ScalarFn& f, const ScalarFn& df, const RootConfig& cfg);

/// Adaptive Gauss-Kronrod (7/15) quadrature with a global error queue.
///
/// `b` may be +infinity; the half line is mapped onto [0, 1) through
/// x = a + u / (1 - u). `tol` is an absolute tolerance. When the
/// subdivision budget runs out the best estimate is returned with
/// converged = false.
QuadResult integrate(const ScalarFn& f, double a, double b, double tol = 1e-10,
                     int max_subdivisions = 4000);

/// Non-regularized incomplete beta B(z; a, b) = int_0^z u^(a-1) (1-u)^(b-1) du.
double incomplete_beta(double z, double a, double b);

/// Complete beta function B(a, b).
double beta_function(double a, double b);

/// Closed form of int_0^inf x / ((1 + r^beta x)^2 (1 + x)^2) dx.
double j_beta(double beta, double r);

/// Inverse of the standard normal cdf.
double normal_quantile(double p);

double digamma(double x);
double trigamma(double x);

}  // namespace dhillon
