#include "dhillon/mle.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "dhillon/errors.hpp"

namespace dhillon {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPi2Plus3 = kPi * kPi + 3.0;

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Log-likelihood with first and second derivatives in (beta, theta), from log-times.
struct LikelihoodParts {
  double ll = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
};

LikelihoodParts evaluate(double beta, double theta, std::span<const double> log_t, bool derivatives) {
  const double n = static_cast<double>(log_t.size());
  const double log_theta = std::log(theta);
  double sum_lt = 0.0, sum_softplus = 0.0;
  double sum_s = 0.0, sum_s_lt = 0.0, sum_s2 = 0.0, sum_v_lt = 0.0, sum_v_lt2 = 0.0;
  for (double lt : log_t) {
    const double z = log_theta + beta * lt;
    sum_lt += lt;
    sum_softplus += softplus(z);
    if (derivatives) {
      const double s = logistic(z);  // theta t^beta / (1 + theta t^beta)
      const double v = s * logistic(-z);
      sum_s += s;
      sum_s_lt += s * lt;
      sum_s2 += s * s;
      sum_v_lt += v * lt;
      sum_v_lt2 += v * lt * lt;
    }
  }
  LikelihoodParts out;
  out.ll = n * std::log(beta) + n * log_theta + (beta - 1.0) * sum_lt - 2.0 * sum_softplus;
  if (derivatives) {
    out.grad(0) = n / beta + sum_lt - 2.0 * sum_s_lt;
    out.grad(1) = (n - 2.0 * sum_s) / theta;
    out.hess(0, 0) = -n / (beta * beta) - 2.0 * sum_v_lt2;
    out.hess(0, 1) = out.hess(1, 0) = -2.0 * sum_v_lt / theta;
    out.hess(1, 1) = (-n + 2.0 * sum_s2) / (theta * theta);
  }
  return out;
}

std::vector<double> log_times(const Dataset& d) {
  std::vector<double> lt(d.size());
  std::transform(d.times().begin(), d.times().end(), lt.begin(), [](double t) { return std::log(t); });
  return lt;
}

}  // namespace

double log_likelihood(const DhillonParams& p, const Dataset& d) {
  return evaluate(p.beta(), p.theta(), log_times(d), false).ll;
}

Eigen::Vector2d score(const DhillonParams& p, const Dataset& d) {
  return evaluate(p.beta(), p.theta(), log_times(d), true).grad;
}

Eigen::Matrix2d log_likelihood_hessian(const DhillonParams& p, const Dataset& d) {
  return evaluate(p.beta(), p.theta(), log_times(d), true).hess;
}

FisherInfo fisher_info(const DhillonParams& p) {
  const double b = p.beta();
  const double th = p.theta();
  const double lth = std::log(th);
  return {(kPi2Plus3 + 3.0 * lth * lth) / (9.0 * b * b), -lth / (3.0 * th * b), 1.0 / (3.0 * th * th)};
}

MomEstimate fit_mom(const Dataset& d) {
  const Eigen::ArrayXd t = d.array();
  const double mean = t.mean();
  const double m2 = t.square().mean();
  const double ratio = m2 / (mean * mean);
  MomEstimate out{std::nullopt, ratio, false};
  if (!(ratio > 1.0) || !std::isfinite(ratio)) return out;

  // tan(y)/y with y = pi/beta is strictly decreasing in beta on (2, inf).
  auto f = [ratio](double beta) {
    const double y = kPi / beta;
    return std::tan(y) / y - ratio;
  };
  auto df = [](double beta) {
    const double y = kPi / beta;
    const double c = std::cos(y);
    const double dg_dy = (y / (c * c) - std::tan(y)) / (y * y);
    return dg_dy * (-y / beta);
  };
  RootConfig cfg;
  cfg.abs_tol = 1e-12;
  cfg.max_iter = 400;
  cfg.bracket = {2.0 + 1e-9, 1e6};
  double beta;
  try {
    beta = find_root(f, df, cfg);
  } catch (const Error&) {
    return out;
  }
  const double theta = std::pow(mean * beta * std::sin(kPi / beta) / kPi, -beta);
  if (!(theta > 0.0) || !std::isfinite(theta)) return out;
  out.params = DhillonParams(beta, theta);
  out.feasible = true;
  return out;
}

DhillonParams initial_estimate(const Dataset& d) {
  const auto mom = fit_mom(d);
  if (mom.feasible) return *mom.params;
  return DhillonParams(1.0, 1.0 / d.median());
}

MleFit fit_mle(const Dataset& d, double level, const RootConfig& cfg) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("fit_mle: level must lie in (0, 1)");
  if (d.size() < 2) throw DegenerateData("fit_mle: at least two observations are required");
  if (d.degenerate()) throw DegenerateData("fit_mle: all observations are equal");
  cfg.validate();

  // Sorted log-times make the fit independent of the input order bit for bit.
  std::vector<double> lt = log_times(d);
  std::sort(lt.begin(), lt.end());

  constexpr double kScoreTol = 1e-6;
  constexpr double kRelTol = 1e-9;
  constexpr double kMaxStep = 2.0;

  const DhillonParams start = initial_estimate(d);
  Eigen::Vector2d x(std::log(start.beta()), std::log(start.theta()));
  auto parts_at = [&lt](const Eigen::Vector2d& y) { return evaluate(std::exp(y(0)), std::exp(y(1)), lt, true); };
  LikelihoodParts cur = parts_at(x);

  bool converged = false;
  int iter = 0;
  for (; iter < cfg.max_iter && !converged; ++iter) {
    const double beta = std::exp(x(0));
    const double theta = std::exp(x(1));
    // Chain rule into log coordinates.
    const Eigen::Vector2d g(beta * cur.grad(0), theta * cur.grad(1));
    Eigen::Matrix2d h;
    h(0, 0) = beta * beta * cur.hess(0, 0) + g(0);
    h(1, 1) = theta * theta * cur.hess(1, 1) + g(1);
    h(0, 1) = h(1, 0) = beta * theta * cur.hess(0, 1);

    Eigen::Vector2d step;
    const Eigen::LLT<Eigen::Matrix2d> llt(-h);
    if (llt.info() == Eigen::Success) {
      step = llt.solve(g);
    } else {
      step = g / std::max(1.0, g.cwiseAbs().maxCoeff());
    }
    const double biggest = step.cwiseAbs().maxCoeff();
    if (biggest > kMaxStep) step *= kMaxStep / biggest;

    double t = 1.0;
    Eigen::Vector2d trial = x + step;
    LikelihoodParts next = parts_at(trial);
    while (!(next.ll >= cur.ll) && t > 1e-12) {
      t *= 0.5;
      trial = x + t * step;
      next = parts_at(trial);
    }
    if (!(next.ll >= cur.ll)) {
      // No ascent possible along the step: either we are at the optimum to
      // rounding, or the iteration has stalled.
      converged = cur.grad.cwiseAbs().maxCoeff() < kScoreTol;
      break;
    }
    const double rel_change = (trial - x).cwiseAbs().maxCoeff();
    x = trial;
    cur = next;
    converged = cur.grad.cwiseAbs().maxCoeff() < kScoreTol && rel_change < kRelTol;
  }
  if (!converged) {
    throw NotConverged("fit_mle: no stationary point after " + std::to_string(iter) +
                       " iterations (last beta = " + num(std::exp(x(0))) +
                       ", theta = " + num(std::exp(x(1))) + ")");
  }

  const DhillonParams est(std::exp(x(0)), std::exp(x(1)));
  const double n = static_cast<double>(d.size());
  const FisherInfo fi = fisher_info(est);
  const Eigen::Matrix2d cov = (n * fi.matrix()).inverse();
  const double b = est.beta();
  const double th = est.theta();
  const double lth = std::log(th);
  const double se_beta = std::sqrt(9.0 * b * b / (n * kPi2Plus3));
  const double se_theta = std::sqrt(3.0 * th * th * (kPi2Plus3 + 3.0 * lth * lth) / (n * kPi2Plus3));
  const double z = normal_quantile(0.5 + 0.5 * level);
  return MleFit{est,
                cur.ll,
                fi,
                cov,
                se_beta,
                se_theta,
                {b - z * se_beta, b + z * se_beta},
                {th - z * se_theta, th + z * se_theta},
                level,
                true,
                iter};
}

}  // namespace dhillon
