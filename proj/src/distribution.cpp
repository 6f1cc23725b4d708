#include "dhillon/distribution.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "dhillon/errors.hpp"
#include "dhillon/numerics.hpp"
#include "dhillon/rng.hpp"

namespace dhillon {

namespace {

// log(theta t^beta) for t > 0; never forms the power directly.
double log_odds(const DhillonParams& p, double t) { return std::log(p.theta()) + p.beta() * std::log(t); }

// log(1 + e^z)
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// e^z / (1 + e^z)
double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void require_positive_time(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError(std::string(what) + ": t must be positive and finite");
}

void require_nonnegative_time(double t, const char* what) {
  if (!(t >= 0.0)) throw DomainError(std::string(what) + ": t must be non-negative");
}

}  // namespace

DhillonParams::DhillonParams(double beta, double theta) : beta_(beta), theta_(theta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("DhillonParams: beta must be positive and finite");
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw DomainError("DhillonParams: theta must be positive and finite");
  }
}

double log_pdf(const DhillonParams& p, double t) {
  require_positive_time(t, "log_pdf");
  const double z = log_odds(p, t);
  return std::log(p.beta()) + std::log(p.theta()) + (p.beta() - 1.0) * std::log(t) - 2.0 * softplus(z);
}

double pdf(const DhillonParams& p, double t) {
  require_positive_time(t, "pdf");
  // h(t) R(t) with both factors evaluated stably.
  const double z = log_odds(p, t);
  const double hz = p.beta() / t * logistic(z);
  return hz * logistic(-z);
}

double survival(const DhillonParams& p, double t) {
  require_nonnegative_time(t, "survival");
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  return logistic(-log_odds(p, t));
}

Eigen::ArrayXd survival(const DhillonParams& p, const Eigen::ArrayXd& t) {
  return t.unaryExpr([&p](double x) { return survival(p, x); });
}

double cdf(const DhillonParams& p, double t) {
  require_nonnegative_time(t, "cdf");
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return 1.0;
  return logistic(log_odds(p, t));
}

double hazard(const DhillonParams& p, double t) {
  require_positive_time(t, "hazard");
  return p.beta() / t * logistic(log_odds(p, t));
}

HazardShape hazard_shape(const DhillonParams& p) {
  if (p.beta() <= 1.0) return {HazardShape::Kind::Decreasing, std::nullopt};
  const double mode = std::pow((p.beta() - 1.0) / p.theta(), 1.0 / p.beta());
  return {HazardShape::Kind::Unimodal, mode};
}

double quantile(const DhillonParams& p, double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must lie in (0, 1)");
  return std::exp((std::log(u) - std::log1p(-u) - std::log(p.theta())) / p.beta());
}

Dataset sample(const DhillonParams& p, std::span<const double> uniforms) {
  std::vector<double> times;
  times.reserve(uniforms.size());
  for (double u : uniforms) times.push_back(quantile(p, u));
  return Dataset(std::move(times), "dhillon_sample");
}

Dataset sample(const DhillonParams& p, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("sample: n must be at least 1");
  Xoshiro256 rng(seed);
  std::vector<double> u(n);
  for (auto& x : u) x = rng.uniform();
  return sample(p, u);
}

double raw_moment(const DhillonParams& p, double r) {
  if (!(r > 0.0 && r < p.beta())) {
    throw MomentDoesNotExist("raw_moment: E[T^r] exists only for 0 < r < beta (r = " + num(r) +
                             ", beta = " + num(p.beta()) + ")");
  }
  const double ratio = r / p.beta();
  return std::numbers::pi * ratio / std::sin(std::numbers::pi * ratio) * std::pow(p.theta(), -ratio);
}

MeanVariance mean_variance(const DhillonParams& p) {
  MeanVariance out;
  if (p.beta() > 1.0) out.mean = raw_moment(p, 1.0);
  if (p.beta() > 2.0) out.variance = raw_moment(p, 2.0) - *out.mean * *out.mean;
  return out;
}

double mean_residual_life(const DhillonParams& p, double t) {
  if (p.beta() <= 1.0) {
    throw MrlUndefined("mean_residual_life: exists only for beta > 1 (beta = " + num(p.beta()) + ")");
  }
  require_nonnegative_time(t, "mean_residual_life");
  const double inv_beta = 1.0 / p.beta();
  const double scale = std::pow(p.theta(), -inv_beta) * inv_beta;
  if (t == 0.0) return scale * incomplete_beta(1.0, 1.0 - inv_beta, inv_beta);
  // 1 + theta t^beta and its reciprocal, from the log-odds.
  const double z = log_odds(p, t);
  const double one_plus = std::exp(softplus(z));
  const double a = 1.0 - inv_beta;
  // For small t, 1/(1 + theta t^beta) rounds to 1; reflect onto its complement.
  const double y = logistic(z);
  if (y < 0.5) return scale * one_plus * (beta_function(a, inv_beta) - incomplete_beta(y, inv_beta, a));
  return scale * one_plus * incomplete_beta(logistic(-z), a, inv_beta);
}

}  // namespace dhillon
