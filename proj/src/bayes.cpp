#include "dhillon/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "dhillon/errors.hpp"
#include "dhillon/numerics.hpp"
#include "dhillon/rng.hpp"

namespace dhillon {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Log-likelihood from precomputed log-times; the sampler's inner loop.
struct LogLikelihood {
  std::vector<double> log_t;
  double sum_log_t = 0.0;

  explicit LogLikelihood(const Dataset& d) {
    log_t.reserve(d.size());
    for (double t : d.times()) log_t.push_back(std::log(t));
    sum_log_t = std::accumulate(log_t.begin(), log_t.end(), 0.0);
  }

  double operator()(double beta, double theta) const {
    const double n = static_cast<double>(log_t.size());
    const double log_theta = std::log(theta);
    double acc = 0.0;
    for (double lt : log_t) acc += softplus(log_theta + beta * lt);
    return n * (std::log(beta) + log_theta) + (beta - 1.0) * sum_log_t - 2.0 * acc;
  }
};

double log_prior_raw(Prior prior, double beta, double theta) {
  switch (prior) {
    case Prior::JeffreysReference:
      return -std::log(beta) - std::log(theta);
    case Prior::Mdip:
      return std::log(beta) + std::log(theta) / beta;
  }
  return kNaN;
}

// Spectral density at frequency zero, Bartlett window of `lags` lags.
double spectral_density_zero(std::span<const double> x, int lags) {
  const auto n = static_cast<int>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  auto autocov = [&](int k) {
    double acc = 0.0;
    for (int i = 0; i + k < n; ++i) acc += (x[i] - mean) * (x[i + k] - mean);
    return acc / n;
  };
  double s = autocov(0);
  for (int k = 1; k <= lags; ++k) s += 2.0 * (1.0 - static_cast<double>(k) / (lags + 1)) * autocov(k);
  return s;
}

}  // namespace

const char* to_string(Prior prior) {
  switch (prior) {
    case Prior::JeffreysReference:
      return "jeffreys";
    case Prior::Mdip:
      return "mdip";
  }
  return "unknown";
}

void McmcConfig::validate() const {
  if (iterations < 1) throw DomainError("McmcConfig: iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) throw DomainError("McmcConfig: burn_in must lie in [0, iterations)");
  if (thin < 1) throw DomainError("McmcConfig: thin must be at least 1");
  if (!(a_beta > 0.0) || !(a_theta > 0.0)) throw DomainError("McmcConfig: proposal shapes must be positive");
  if (!(geweke_level > 0.0 && geweke_level < 1.0)) throw DomainError("McmcConfig: geweke_level must lie in (0, 1)");
  if (retained() < 1) throw DomainError("McmcConfig: no draws would be retained");
}

double log_prior(Prior prior, const DhillonParams& p) { return log_prior_raw(prior, p.beta(), p.theta()); }

ValidityReport check_validity(Prior prior, const Dataset& d) {
  ValidityReport r;
  if (prior == Prior::Mdip) {
    r.messages.push_back(
        "the MDIP prior beta*theta^(1/beta) yields an improper posterior for every sample size: the theta "
        "integral of the normalizing constant diverges");
    return r;
  }
  const std::size_t n = d.size();
  const bool distinct = !d.degenerate();
  r.posterior_proper = n >= 2 && distinct;
  r.beta_moments_finite = r.posterior_proper;
  if (n < 2) r.messages.push_back("posterior is improper: at least two observations are required");
  if (n >= 2 && !distinct) r.messages.push_back("posterior is improper: all observations are equal");

  const auto below = std::count_if(d.times().begin(), d.times().end(), [](double t) { return t < 1.0; });
  const auto above = std::count_if(d.times().begin(), d.times().end(), [](double t) { return t > 1.0; });
  r.theta_mean_guaranteed = r.posterior_proper && below >= 1 && above >= 2;
  if (r.posterior_proper && !r.theta_mean_guaranteed) {
    std::string msg = "posterior mean of theta is not guaranteed finite: need at least one observation below 1 (have " +
                      std::to_string(below) + ") and at least two above 1 (have " + std::to_string(above) + ")";
    if (n == 2 && above == 0) msg += "; with two observations both below 1 the posterior mean of theta is infinite";
    r.messages.push_back(std::move(msg));
  }
  return r;
}

double log_posterior(Prior prior, const DhillonParams& p, const Dataset& d) {
  return log_prior(prior, p) + LogLikelihood(d)(p.beta(), p.theta());
}

double gamma_proposal_log_ratio(double current, double proposed, double a) {
  const double log_ratio = std::log(current) - std::log(proposed);
  return (2.0 * a - 1.0) * log_ratio + a * (proposed / current - current / proposed);
}

double mh_acceptance(double log_target_proposed, double log_target_current, double current, double proposed,
                     double a) {
  const double log_a = log_target_proposed - log_target_current + gamma_proposal_log_ratio(current, proposed, a);
  if (std::isnan(log_a)) return 0.0;
  return log_a >= 0.0 ? 1.0 : std::exp(log_a);
}

McmcChain run_mh(const LogTarget& log_target, const DhillonParams& init, const McmcConfig& cfg) {
  cfg.validate();
  Xoshiro256 rng(cfg.seed);

  double beta = init.beta();
  double theta = init.theta();
  double lp = log_target(beta, theta);
  if (!std::isfinite(lp)) throw DomainError("run_mh: log target is not finite at the starting point");

  double a_beta = cfg.a_beta;
  double a_theta = cfg.a_theta;
  constexpr int kTuneWindow = 100;
  int window_acc_beta = 0, window_acc_theta = 0;
  long kept_acc_beta = 0, kept_acc_theta = 0;

  McmcChain chain;
  chain.seed = cfg.seed;
  chain.draws.resize(cfg.retained(), 2);
  Eigen::Index next_row = 0;

  // Returns true when the proposal was accepted.
  auto update = [&](double& state, double a, auto&& target_at) {
    std::gamma_distribution<double> proposal(a, state / a);
    const double proposed = proposal(rng);
    const double u = rng.uniform();
    if (!(proposed > 0.0) || !std::isfinite(proposed)) return false;
    const double lp_new = target_at(proposed);
    const double accept = mh_acceptance(lp_new, lp, state, proposed, a);
    if (u <= accept) {
      state = proposed;
      lp = lp_new;
      return true;
    }
    return false;
  };

  for (int j = 0; j < cfg.iterations; ++j) {
    const bool acc_theta = update(theta, a_theta, [&](double th) { return log_target(beta, th); });
    const bool acc_beta = update(beta, a_beta, [&](double b) { return log_target(b, theta); });

    if (j < cfg.burn_in) {
      window_acc_theta += acc_theta;
      window_acc_beta += acc_beta;
      if (cfg.tune && (j + 1) % kTuneWindow == 0) {
        // Larger shape means a tighter proposal and a higher acceptance rate.
        auto retune = [](double& a, int accepted) {
          const double rate = static_cast<double>(accepted) / kTuneWindow;
          if (rate < 0.2) a *= 1.5;
          if (rate > 0.4) a *= 0.66;
        };
        retune(a_theta, window_acc_theta);
        retune(a_beta, window_acc_beta);
        window_acc_theta = window_acc_beta = 0;
      }
      continue;
    }
    kept_acc_theta += acc_theta;
    kept_acc_beta += acc_beta;
    if ((j - cfg.burn_in + 1) % cfg.thin == 0 && next_row < chain.draws.rows()) {
      chain.draws(next_row, 0) = beta;
      chain.draws(next_row, 1) = theta;
      ++next_row;
    }
  }

  const double kept = static_cast<double>(cfg.iterations - cfg.burn_in);
  chain.accept_rate_beta = kept_acc_beta / kept;
  chain.accept_rate_theta = kept_acc_theta / kept;
  chain.a_beta = a_beta;
  chain.a_theta = a_theta;

  const double z_crit = normal_quantile(0.5 + 0.5 * cfg.geweke_level);
  auto z_of = [&](int col) {
    std::vector<double> series(chain.draws.col(col).data(), chain.draws.col(col).data() + chain.draws.rows());
    try {
      return geweke_z(series);
    } catch (const Error&) {
      return kNaN;
    }
  };
  chain.geweke_z_beta = z_of(0);
  chain.geweke_z_theta = z_of(1);
  chain.passed_geweke = std::abs(chain.geweke_z_beta) < z_crit && std::abs(chain.geweke_z_theta) < z_crit;
  return chain;
}

McmcChain run_mh(Prior prior, const Dataset& d, const McmcConfig& cfg) {
  const ValidityReport validity = check_validity(prior, d);
  if (!validity.posterior_proper) {
    std::string msg = "refusing to sample:";
    for (const auto& m : validity.messages) msg += " " + m + ";";
    throw ImproperPosterior(msg);
  }
  const LogLikelihood loglik(d);
  const LogTarget target = [&loglik, prior](double beta, double theta) {
    return log_prior_raw(prior, beta, theta) + loglik(beta, theta);
  };
  return run_mh(target, cfg.init ? *cfg.init : initial_estimate(d), cfg);
}

double geweke_z(std::span<const double> series, double frac_first, double frac_last) {
  if (series.size() < 100) throw DomainError("geweke_z: at least 100 values are required");
  if (!(frac_first > 0.0 && frac_last > 0.0 && frac_first + frac_last <= 1.0)) {
    throw DomainError("geweke_z: window fractions must be positive and sum to at most 1");
  }
  const auto n = series.size();
  const auto n_first = static_cast<std::size_t>(std::floor(frac_first * n));
  const auto n_last = static_cast<std::size_t>(std::floor(frac_last * n));
  const auto first = series.first(n_first);
  const auto last = series.last(n_last);

  auto mean_and_var = [](std::span<const double> w) {
    const double mean = std::accumulate(w.begin(), w.end(), 0.0) / w.size();
    const int lags = static_cast<int>(std::ceil(0.04 * w.size()));
    const double s0 = spectral_density_zero(w, lags);
    return std::pair{mean, s0 / w.size()};
  };
  const auto [m1, v1] = mean_and_var(first);
  const auto [m2, v2] = mean_and_var(last);
  if (!(v1 > 0.0) || !(v2 > 0.0)) throw DegenerateSeries("geweke_z: a window has zero variance");
  return (m1 - m2) / std::sqrt(v1 + v2);
}

double sample_quantile(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw EmptyInput("sample_quantile: no values");
  const double h = (sorted.size() - 1) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
}

PosteriorSummary summarize(const McmcChain& chain, double level) {
  if (chain.draws.rows() == 0) throw EmptyChain("summarize: chain has no draws");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("summarize: level must lie in (0, 1)");
  PosteriorSummary s;
  s.level = level;
  const double alpha = 1.0 - level;
  Interval cis[2];
  for (int c = 0; c < 2; ++c) {
    std::vector<double> v(chain.draws.col(c).data(), chain.draws.col(c).data() + chain.draws.rows());
    std::sort(v.begin(), v.end());
    const double m = chain.draws.col(c).mean();
    const double var = (chain.draws.col(c).array() - m).square().sum() / std::max<Eigen::Index>(1, v.size() - 1);
    s.mean(c) = m;
    s.sd(c) = v.size() > 1 ? std::sqrt(var) : 0.0;
    s.median(c) = sample_quantile(v, 0.5);
    cis[c] = {sample_quantile(v, 0.5 * alpha), sample_quantile(v, 1.0 - 0.5 * alpha)};
  }
  s.ci_beta = cis[0];
  s.ci_theta = cis[1];
  return s;
}

std::vector<double> posterior_predictive(const McmcChain& chain, std::span<const double> uniforms) {
  if (chain.draws.rows() == 0) throw EmptyChain("posterior_predictive: chain has no draws");
  if (uniforms.size() != chain.size()) throw DomainError("posterior_predictive: one uniform per draw is required");
  std::vector<double> out(chain.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const DhillonParams p(chain.draws(j, 0), chain.draws(j, 1));
    out[j] = quantile(p, uniforms[j]);
  }
  return out;
}

std::vector<double> posterior_predictive(const McmcChain& chain, std::uint64_t seed) {
  if (chain.draws.rows() == 0) throw EmptyChain("posterior_predictive: chain has no draws");
  Xoshiro256 rng(seed);
  std::vector<double> u(chain.size());
  for (auto& x : u) x = rng.uniform();
  return posterior_predictive(chain, u);
}

PredictiveSummary summarize_predictive(std::span<const double> draws, double level) {
  if (draws.empty()) throw EmptyChain("summarize_predictive: no draws");
  std::vector<double> v(draws.begin(), draws.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : draws) ss += (x - mean) * (x - mean);
  const double alpha = 1.0 - level;
  return {mean,
          v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0,
          sample_quantile(v, 0.5),
          {sample_quantile(v, 0.5 * alpha), sample_quantile(v, 1.0 - 0.5 * alpha)},
          level};
}

double mdip_truncated_mass(const Dataset& d, double beta, double theta_max) {
  if (!(beta > 0.0)) throw DomainError("mdip_truncated_mass: beta must be positive");
  if (!(theta_max > 1.0)) throw DomainError("mdip_truncated_mass: theta_max must exceed 1");
  const LogLikelihood loglik(d);
  auto kernel = [&](double theta) {
    return std::exp(log_prior_raw(Prior::Mdip, beta, theta) + loglik(beta, theta));
  };
  const QuadResult rough = integrate(kernel, 1.0, theta_max, 1e-3);
  return integrate(kernel, 1.0, theta_max, std::max(1e-300, 1e-10 * std::abs(rough.value))).value;
}

double two_point_theta_mean_kernel(double beta, double t1, double t2) {
  if (!(beta > 0.0)) throw DomainError("two_point_theta_mean_kernel: beta must be positive");
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw DomainError("two_point_theta_mean_kernel: times must be positive");
  if (t1 > t2) std::swap(t1, t2);
  const double s = beta * std::log(t1 / t2);  // log r^beta, r = t1/t2 <= 1
  const double em1 = std::expm1(s);
  double ratio;
  if (std::abs(s) >= 0.5) {
    ratio = (em1 * (em1 + 2.0) - 2.0 * (em1 + 1.0) * s) / (em1 * em1 * em1);
  } else {
    // e^{2s} - 1 - 2 s e^s = sum_{k>=3} (2^k - 2k) s^k / k!
    double num = 0.0;
    double pow2 = 8.0;
    double term = 1.0 / 6.0;  // s^0 / 3!
    for (int k = 3; k < 60; ++k) {
      const double contrib = (pow2 - 2.0 * k) * term;
      num += contrib;
      if (k > 5 && std::abs(contrib) < 1e-18 * std::abs(num)) break;
      pow2 *= 2.0;
      term *= s / (k + 1);
    }
    const double q = (s == 0.0) ? 1.0 : em1 / s;
    ratio = num / (q * q * q);
  }
  return std::pow(t2, -beta) * ratio;
}

}  // namespace dhillon
