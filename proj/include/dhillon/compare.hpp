#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dhillon/dataset.hpp"

namespace dhillon {

/// Survival exp(-(t/scale)^shape).
struct WeibullParams {
  double shape;
  double scale;
};

/// Density rate^shape t^(shape-1) e^(-rate t) / Gamma(shape).
struct GammaParams {
  double shape;
  double rate;
};

struct WeibullFit {
  WeibullParams params;
  double loglik;
};

struct GammaFit {
  GammaParams params;
  double loglik;
};

double weibull_log_likelihood(const WeibullParams& p, const Dataset& d);
double gamma_log_likelihood(const GammaParams& p, const Dataset& d);
/// Gradients with respect to (shape, scale) and (shape, rate).
Eigen::Vector2d weibull_score(const WeibullParams& p, const Dataset& d);
Eigen::Vector2d gamma_score(const GammaParams& p, const Dataset& d);

/// Profile-likelihood MLE; throws DegenerateData or NotConverged.
WeibullFit fit_weibull(const Dataset& d);
GammaFit fit_gamma(const Dataset& d);

struct CriteriaRow {
  std::string model;
  int k = 0;
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  double aicc = 0.0;
  /// Fitted parameters by name; empty for failed rows.
  std::map<std::string, double> params;
  bool ok = true;
  std::string error;
};

/// Throws DomainError when n <= k + 1.
CriteriaRow criteria(double loglik, int k, int n);

struct SurvivalSeries {
  enum class Kind { Empirical, Parametric };
  Kind kind;
  std::string model;
  std::vector<std::pair<double, double>> points;
};

/// Uncensored Kaplan-Meier estimate (1 - ECDF) at the sorted distinct times,
/// preceded by the point (0, 1).
SurvivalSeries empirical_survival(const Dataset& d);

/// Fits Dhillon, Weibull and Gamma and orders the rows by AIC. A failing fit
/// stays in the list, marked ok = false and sorted last. With n = 3 the AICc
/// column is NaN. Throws DomainError when n < 3.
std::vector<CriteriaRow> compare(const Dataset& d);

/// Parametric survival curves of every successful row on `grid`.
std::vector<SurvivalSeries> parametric_survival(const std::vector<CriteriaRow>& rows, const std::vector<double>& grid);

}  // namespace dhillon
