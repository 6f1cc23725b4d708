#include "report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>

#ifndef DHILLON_VERSION
#define DHILLON_VERSION "0.0.0"
#endif

namespace dhillon {

namespace {

// NaN and infinities become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec2(const Eigen::Vector2d& v) { return {{"beta", number(v(0))}, {"theta", number(v(1))}}; }

}  // namespace

void to_json(json& j, const DhillonParams& p) { j = {{"beta", p.beta()}, {"theta", p.theta()}}; }

void to_json(json& j, const Interval& i) { j = json::array({number(i.lo), number(i.hi)}); }

void to_json(json& j, const FisherInfo& f) {
  j = {{"i_beta_beta", f.i_bb}, {"i_beta_theta", f.i_bt}, {"i_theta_theta", f.i_tt}};
}

void to_json(json& j, const MleFit& f) {
  j = {{"params", f.params},
       {"loglik", f.loglik},
       {"fisher_per_observation", f.fisher},
       {"covariance",
        json::array({json::array({f.covariance(0, 0), f.covariance(0, 1)}),
                     json::array({f.covariance(1, 0), f.covariance(1, 1)})})},
       {"se", {{"beta", f.se_beta}, {"theta", f.se_theta}}},
       {"ci", {{"beta", f.ci_beta}, {"theta", f.ci_theta}}},
       {"level", f.level},
       {"converged", f.converged},
       {"iterations", f.iterations}};
}

void to_json(json& j, const MomEstimate& m) {
  j = {{"feasible", m.feasible}, {"moment_ratio", number(m.ratio)}};
  j["params"] = m.params ? json(*m.params) : json(nullptr);
}

void to_json(json& j, const ValidityReport& v) {
  j = {{"posterior_proper", v.posterior_proper},
       {"beta_moments_finite", v.beta_moments_finite},
       {"theta_mean_guaranteed", v.theta_mean_guaranteed},
       {"messages", v.messages}};
}

void to_json(json& j, const PosteriorSummary& s) {
  j = {{"median", vec2(s.median)},
       {"mean", vec2(s.mean)},
       {"sd", vec2(s.sd)},
       {"ci", {{"beta", s.ci_beta}, {"theta", s.ci_theta}}},
       {"level", s.level}};
}

void to_json(json& j, const PredictiveSummary& s) {
  j = {{"mean", s.mean}, {"sd", s.sd}, {"median", s.median}, {"interval", s.interval}, {"level", s.level}};
}

void to_json(json& j, const CriteriaRow& r) {
  j = {{"model", r.model},  {"k", r.k},           {"loglik", number(r.loglik)}, {"bic", number(r.bic)},
       {"aic", number(r.aic)}, {"aicc", number(r.aicc)}, {"params", r.params},        {"ok", r.ok}};
  if (!r.ok) j["error"] = r.error;
}

void to_json(json& j, const SimRow& r) {
  j = {{"estimator", to_string(r.estimator)}, {"parameter", to_string(r.parameter)}, {"n", r.n},
       {"bias", number(r.bias)},              {"mse", number(r.mse)},                 {"used", r.used}};
  j["cp"] = r.cp ? json(*r.cp) : json(nullptr);
}

void to_json(json& j, const SimCounts& c) {
  j = {{"n", c.n},
       {"mom_infeasible", c.mom_infeasible},
       {"mle_not_converged", c.mle_not_converged},
       {"geweke_fail", c.geweke_fail},
       {"geweke_reruns", c.geweke_reruns}};
}

void to_json(json& j, const SimReport& r) { j = {{"rows", r.rows}, {"counts", r.counts}}; }

json chain_diagnostics(const McmcChain& c) {
  return {{"draws", c.size()},
          {"seed", c.seed},
          {"accept_rate", {{"beta", c.accept_rate_beta}, {"theta", c.accept_rate_theta}}},
          {"proposal_shape", {{"beta", c.a_beta}, {"theta", c.a_theta}}},
          {"geweke_z", {{"beta", number(c.geweke_z_beta)}, {"theta", number(c.geweke_z_theta)}}},
          {"passed_geweke", c.passed_geweke}};
}

RunManifest RunManifest::make(std::string command, std::uint64_t seed, json config) {
  std::time_t now = std::time(nullptr);
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
    long long v = 0;
    const auto [p, ec] = std::from_chars(sde, sde + std::char_traits<char>::length(sde), v);
    if (ec == std::errc() && *p == '\0') now = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return {std::move(command), seed, std::move(config), DHILLON_VERSION, buf};
}

void to_json(json& j, const RunManifest& m) {
  j = {{"command", m.command},
       {"seed", m.seed},
       {"config", m.config},
       {"tool_version", m.tool_version},
       {"timestamp", m.timestamp}};
}

std::string format_full(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string format_sig4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string chain_csv(const McmcChain& c) {
  std::string out = "iter,beta,theta\n";
  for (Eigen::Index i = 0; i < c.draws.rows(); ++i) {
    out += std::to_string(i + 1) + "," + format_full(c.draws(i, 0)) + "," + format_full(c.draws(i, 1)) + "\n";
  }
  return out;
}

std::string times_csv(std::span<const double> times) {
  std::string out = "time\n";
  for (double t : times) out += format_full(t) + "\n";
  return out;
}

std::string survival_csv(const std::vector<SurvivalSeries>& series) {
  std::string out = "model,t,s\n";
  for (const auto& s : series) {
    for (const auto& [t, v] : s.points) out += s.model + "," + format_full(t) + "," + format_full(v) + "\n";
  }
  return out;
}

namespace {

std::string ci_text(const Interval& i) { return "(" + format_sig4(i.lo) + ", " + format_sig4(i.hi) + ")"; }

std::string pct(double level) { return format_sig4(100.0 * level) + "%"; }

}  // namespace

std::string text_mle(const MleFit& f, const std::string& unit) {
  std::string out = "Maximum likelihood fit (time unit: " + unit + ")\n";
  out += "  beta  = " + format_sig4(f.params.beta()) + "  SE " + format_sig4(f.se_beta) + "  " + pct(f.level) +
         " CI " + ci_text(f.ci_beta) + "\n";
  out += "  theta = " + format_sig4(f.params.theta()) + "  SE " + format_sig4(f.se_theta) + "  " + pct(f.level) +
         " CI " + ci_text(f.ci_theta) + "\n";
  out += "  log-likelihood " + format_sig4(f.loglik) + " after " + std::to_string(f.iterations) + " iterations\n";
  return out;
}

std::string text_mom(const MomEstimate& m) {
  if (!m.feasible) {
    return "Method of moments: infeasible (m2 / mean^2 = " + format_sig4(m.ratio) +
           " implies beta <= 2, where the variance does not exist)\n";
  }
  return "Method of moments\n  beta  = " + format_sig4(m.params->beta()) + "\n  theta = " +
         format_sig4(m.params->theta()) + "\n";
}

std::string text_bayes(const PosteriorSummary& s, const McmcChain& c, const ValidityReport& v) {
  std::string out = "Posterior under the Jeffreys/reference prior (" + std::to_string(c.size()) + " draws)\n";
  out += "            median      mean        sd   " + pct(s.level) + " interval\n";
  auto row = [&](const char* name, int k, const Interval& ci) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "  %-6s %9s %9s %9s   %s\n", name, format_sig4(s.median(k)).c_str(),
                  format_sig4(s.mean(k)).c_str(), format_sig4(s.sd(k)).c_str(), ci_text(ci).c_str());
    out += buf;
  };
  row("beta", 0, s.ci_beta);
  row("theta", 1, s.ci_theta);
  out += "  acceptance: beta " + format_sig4(c.accept_rate_beta) + ", theta " + format_sig4(c.accept_rate_theta) + "\n";
  out += "  Geweke z: beta " + format_sig4(c.geweke_z_beta) + ", theta " + format_sig4(c.geweke_z_theta) +
         (c.passed_geweke ? " (passed)\n" : " (FAILED: treat the summary with caution)\n");
  out += std::string("  posterior mean of theta guaranteed finite: ") + (v.theta_mean_guaranteed ? "yes" : "no") + "\n";
  for (const auto& m : v.messages) out += "  note: " + m + "\n";
  return out;
}

std::string text_predictive(const PredictiveSummary& s, const std::string& unit) {
  return "Posterior predictive lifetime (time unit: " + unit + ")\n  mean " + format_sig4(s.mean) + ", sd " +
         format_sig4(s.sd) + ", median " + format_sig4(s.median) + ", " + pct(s.level) + " interval " +
         ci_text(s.interval) + "\n";
}

std::string text_criteria(const std::vector<CriteriaRow>& rows, std::size_t n) {
  std::string out = "Model comparison (n = " + std::to_string(n) +
                    ", k = 2 for every model; lower is better). EEG, WL, GE and EP are not fitted.\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "  %-8s %10s %10s %10s %10s\n", "Model", "BIC", "AIC", "AICc", "loglik");
  out += buf;
  for (const auto& r : rows) {
    if (r.ok) {
      std::snprintf(buf, sizeof buf, "  %-8s %10s %10s %10s %10s\n", r.model.c_str(), format_sig4(r.bic).c_str(),
                    format_sig4(r.aic).c_str(), format_sig4(r.aicc).c_str(), format_sig4(r.loglik).c_str());
    } else {
      std::snprintf(buf, sizeof buf, "  %-8s failed: ", r.model.c_str());
      out += buf + r.error + "\n";
      continue;
    }
    out += buf;
  }
  return out;
}

}  // namespace dhillon
