#include "dhillon/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dhillon/distribution.hpp"
#include "dhillon/errors.hpp"
#include "dhillon/mle.hpp"
#include "dhillon/numerics.hpp"

namespace dhillon {

namespace {

constexpr double kScoreTol = 1e-6;

void require_fittable(const Dataset& d, const char* who) {
  if (d.size() < 2) throw DegenerateData(std::string(who) + ": at least two observations are required");
  if (d.degenerate()) throw DegenerateData(std::string(who) + ": all observations are equal");
}

Eigen::ArrayXd log_array(const Dataset& d) { return d.array().log(); }

// log(a) - digamma(a) and its derivative; asymptotic series where the difference cancels.
double log_minus_digamma(double a) {
  if (a < 100.0) return std::log(a) - digamma(a);
  const double r = 1.0 / (a * a);
  return 1.0 / (2.0 * a) + r * (1.0 / 12.0 - r * (1.0 / 120.0 - r / 252.0));
}

double log_minus_digamma_derivative(double a) {
  if (a < 100.0) return 1.0 / a - trigamma(a);
  const double r = 1.0 / (a * a);
  return -r * (0.5 + (1.0 / a) * (1.0 / 6.0 - r * (1.0 / 30.0 - r / 42.0)));
}

// criteria() without the AICc precondition: with n = k + 1 the correction is undefined.
CriteriaRow row_criteria(double loglik, int k, int n) {
  if (n > k + 1) return criteria(loglik, k, n);
  CriteriaRow row = criteria(loglik, k, k + 2);
  row.bic = -2.0 * loglik + k * std::log(static_cast<double>(n));
  row.aicc = std::numeric_limits<double>::quiet_NaN();
  return row;
}

}  // namespace

double weibull_log_likelihood(const WeibullParams& p, const Dataset& d) {
  const Eigen::ArrayXd lt = log_array(d);
  const double n = static_cast<double>(d.size());
  const double ls = std::log(p.scale);
  return n * std::log(p.shape) - n * p.shape * ls + (p.shape - 1.0) * lt.sum() - (p.shape * (lt - ls)).exp().sum();
}

Eigen::Vector2d weibull_score(const WeibullParams& p, const Dataset& d) {
  const Eigen::ArrayXd lz = log_array(d) - std::log(p.scale);  // log(t / scale)
  const Eigen::ArrayXd zk = (p.shape * lz).exp();
  const double n = static_cast<double>(d.size());
  return {n / p.shape + lz.sum() - (zk * lz).sum(), p.shape / p.scale * (zk.sum() - n)};
}

double gamma_log_likelihood(const GammaParams& p, const Dataset& d) {
  const double n = static_cast<double>(d.size());
  return n * p.shape * std::log(p.rate) - n * std::lgamma(p.shape) + (p.shape - 1.0) * log_array(d).sum() -
         p.rate * d.array().sum();
}

Eigen::Vector2d gamma_score(const GammaParams& p, const Dataset& d) {
  const double n = static_cast<double>(d.size());
  return {n * std::log(p.rate) - n * digamma(p.shape) + log_array(d).sum(), n * p.shape / p.rate - d.array().sum()};
}

WeibullFit fit_weibull(const Dataset& d) {
  require_fittable(d, "fit_weibull");
  const Eigen::ArrayXd lt = log_array(d);
  const double mean_lt = lt.mean();
  const Eigen::ArrayXd lc = lt - mean_lt;
  const double max_lc = lc.maxCoeff();

  // Profile equation in u = log(shape); weights t^k are rescaled by the largest time.
  auto moments = [&](double k) {
    const Eigen::ArrayXd w = (k * (lc - max_lc)).exp();
    const double sw = w.sum();
    const double m1 = (w * lc).sum() / sw;
    const double m2 = (w * (lc - m1).square()).sum() / sw;
    return std::pair{m1, m2};
  };
  auto h = [&](double u) { return moments(std::exp(u)).first - std::exp(-u); };
  auto dh = [&](double u) {
    const double k = std::exp(u);
    return k * moments(k).second + 1.0 / k;
  };

  RootConfig cfg;
  cfg.abs_tol = 1e-13;
  cfg.max_iter = 500;
  double hi = std::log(10.0);
  while (h(hi) <= 0.0 && hi < 40.0) hi += std::log(10.0);
  double lo = std::log(0.1);
  while (h(lo) >= 0.0 && lo > -20.0) lo -= std::log(10.0);
  cfg.bracket = {lo, hi};
  double shape;
  try {
    shape = std::exp(find_root(h, dh, cfg));
  } catch (const NoBracket& e) {
    throw NotConverged(std::string("fit_weibull: ") + e.what());
  }
  // scale^k = mean(t^k), via log-sum-exp.
  const double log_mean_tk = std::log((shape * (lc - max_lc)).exp().mean()) + shape * max_lc;
  const WeibullParams params{shape, std::exp(mean_lt + log_mean_tk / shape)};

  const Eigen::Vector2d s = weibull_score(params, d);
  if (!(s.cwiseAbs().maxCoeff() < kScoreTol * std::max(1.0, shape / params.scale))) {
    throw NotConverged("fit_weibull: score did not vanish at the profile solution");
  }
  return {params, weibull_log_likelihood(params, d)};
}

GammaFit fit_gamma(const Dataset& d) {
  require_fittable(d, "fit_gamma");
  const double mean = d.array().mean();
  // log(mean) - mean(log t), relative to the geometric mean so near-ties keep precision.
  const Eigen::ArrayXd lc = log_array(d) - log_array(d).mean();
  const double m = lc.maxCoeff();
  const double target = m + std::log1p((lc - m).unaryExpr([](double v) { return std::expm1(v); }).mean()) -
                        lc.mean();  // > 0 by Jensen
  auto g = [target](double u) { return log_minus_digamma(std::exp(u)) - target; };
  auto dg = [](double u) {
    const double a = std::exp(u);
    return a * log_minus_digamma_derivative(a);
  };
  RootConfig cfg;
  cfg.abs_tol = 1e-13;
  cfg.max_iter = 500;
  cfg.bracket = {std::log(1e-8), std::log(1e20)};
  double shape;
  try {
    shape = std::exp(find_root(g, dg, cfg));
  } catch (const NoBracket& e) {
    throw NotConverged(std::string("fit_gamma: ") + e.what());
  }
  const GammaParams params{shape, shape / mean};
  const Eigen::Vector2d s = gamma_score(params, d);
  if (!(std::abs(s(0)) < kScoreTol * d.size() && std::abs(s(1)) < kScoreTol * std::max(1.0, mean) * d.size())) {
    throw NotConverged("fit_gamma: score did not vanish at the profile solution");
  }
  return {params, gamma_log_likelihood(params, d)};
}

CriteriaRow criteria(double loglik, int k, int n) {
  if (n <= k + 1) {
    throw DomainError("criteria: need n > k + 1 (n = " + std::to_string(n) + ", k = " + std::to_string(k) + ")");
  }
  CriteriaRow row;
  row.k = k;
  row.loglik = loglik;
  row.aic = -2.0 * loglik + 2.0 * k;
  row.bic = -2.0 * loglik + k * std::log(static_cast<double>(n));
  row.aicc = row.aic + 2.0 * k * (k + 1.0) / (n - k - 1.0);
  return row;
}

SurvivalSeries empirical_survival(const Dataset& d) {
  std::vector<double> s(d.times().begin(), d.times().end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  SurvivalSeries out{SurvivalSeries::Kind::Empirical, "empirical", {{0.0, 1.0}}};
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    out.points.emplace_back(s[i], static_cast<double>(s.size() - j) / n);
    i = j;
  }
  return out;
}

std::vector<CriteriaRow> compare(const Dataset& d) {
  if (d.size() < 3) throw DomainError("compare: at least three observations are required");
  const int n = static_cast<int>(d.size());
  std::vector<CriteriaRow> rows;

  auto attempt = [&](const std::string& model, auto&& fit) {
    try {
      auto [loglik, params] = fit();
      CriteriaRow row = row_criteria(loglik, 2, n);
      row.model = model;
      row.params = std::move(params);
      rows.push_back(std::move(row));
    } catch (const Error& e) {
      CriteriaRow row;
      row.model = model;
      row.k = 2;
      row.loglik = row.aic = row.bic = row.aicc = std::numeric_limits<double>::quiet_NaN();
      row.ok = false;
      row.error = e.what();
      rows.push_back(std::move(row));
    }
  };
  using Named = std::map<std::string, double>;
  attempt("Dhillon", [&] {
    const MleFit f = fit_mle(d);
    return std::pair{f.loglik, Named{{"beta", f.params.beta()}, {"theta", f.params.theta()}}};
  });
  attempt("Weibull", [&] {
    const WeibullFit f = fit_weibull(d);
    return std::pair{f.loglik, Named{{"shape", f.params.shape}, {"scale", f.params.scale}}};
  });
  attempt("Gamma", [&] {
    const GammaFit f = fit_gamma(d);
    return std::pair{f.loglik, Named{{"shape", f.params.shape}, {"rate", f.params.rate}}};
  });

  std::stable_sort(rows.begin(), rows.end(), [](const CriteriaRow& a, const CriteriaRow& b) {
    if (a.ok != b.ok) return a.ok;
    return a.ok && a.aic < b.aic;
  });
  return rows;
}

std::vector<SurvivalSeries> parametric_survival(const std::vector<CriteriaRow>& rows, const std::vector<double>& grid) {
  std::vector<SurvivalSeries> out;
  for (const auto& row : rows) {
    if (!row.ok) continue;
    SurvivalSeries s{SurvivalSeries::Kind::Parametric, row.model, {}};
    s.points.reserve(grid.size());
    for (double t : grid) {
      double v = 1.0;
      if (row.model == "Dhillon") {
        v = survival(DhillonParams(row.params.at("beta"), row.params.at("theta")), t);
      } else if (row.model == "Weibull") {
        v = std::exp(-std::pow(t / row.params.at("scale"), row.params.at("shape")));
      } else if (row.model == "Gamma") {
        // Upper regularized incomplete gamma via quadrature of the density.
        const double a = row.params.at("shape");
        const double rate = row.params.at("rate");
        if (t > 0.0) {
          const double lg = std::lgamma(a);
          auto dens = [a, rate, lg](double x) {
            return x <= 0.0 ? 0.0 : std::exp(a * std::log(rate) + (a - 1.0) * std::log(x) - rate * x - lg);
          };
          v = std::clamp(1.0 - integrate(dens, 0.0, t, 1e-10).value, 0.0, 1.0);
        }
      }
      s.points.emplace_back(t, v);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace dhillon
