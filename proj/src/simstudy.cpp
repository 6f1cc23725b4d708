#include "dhillon/simstudy.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <tuple>

#include "dhillon/errors.hpp"
#include "dhillon/rng.hpp"

namespace dhillon {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

}  // namespace

const char* to_string(Estimator e) {
  switch (e) {
    case Estimator::MM:
      return "MM";
    case Estimator::MLE:
      return "MLE";
    case Estimator::Bayes:
      return "Bayes";
  }
  return "unknown";
}

const char* to_string(Parameter p) { return p == Parameter::Beta ? "beta" : "theta"; }

void SimScenario::validate() const {
  if (replicates < 1) throw DomainError("SimScenario: replicates must be at least 1");
  if (n_values.empty()) throw DomainError("SimScenario: no sample sizes given");
  for (int n : n_values) {
    if (n < 2) throw DomainError("SimScenario: every sample size must be at least 2 (got " + std::to_string(n) + ")");
  }
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw DomainError("SimScenario: ci_level must lie in (0, 1)");
  if (geweke_attempts < 1) throw DomainError("SimScenario: geweke_attempts must be at least 1");
  mcmc.validate();
}

const SimRow* SimReport::find(Estimator e, Parameter p, int n) const {
  for (const auto& r : rows) {
    if (r.estimator == e && r.parameter == p && r.n == n) return &r;
  }
  return nullptr;
}

std::pair<double, double> bias_mse(std::span<const double> estimates, double truth) {
  if (estimates.empty()) throw EmptyInput("bias_mse: no estimates");
  double sum = 0.0, sum_sq = 0.0;
  for (double x : estimates) {
    const double e = x - truth;
    sum += e;
    sum_sq += e * e;
  }
  const double n = static_cast<double>(estimates.size());
  return {sum / n, sum_sq / n};
}

ReplicateOutcome default_replicate_estimator(const Dataset& sample, std::uint64_t seed, const SimScenario& s) {
  ReplicateOutcome out;

  const MomEstimate mom = fit_mom(sample);
  if (mom.feasible) {
    out.estimates[0] = PointEstimate{{mom.params->beta(), mom.params->theta()}, std::nullopt, std::nullopt};
  } else {
    out.mom_infeasible = true;
  }

  try {
    const MleFit fit = fit_mle(sample, s.ci_level);
    out.estimates[1] = PointEstimate{{fit.params.beta(), fit.params.theta()}, fit.ci_beta, fit.ci_theta};
  } catch (const Error&) {
    out.mle_not_converged = true;
  }

  McmcConfig cfg = s.mcmc;
  for (int attempt = 0; attempt < s.geweke_attempts; ++attempt) {
    cfg.seed = derive_seed(seed, {static_cast<std::uint64_t>(attempt)});
    McmcChain chain;
    try {
      chain = run_mh(Prior::JeffreysReference, sample, cfg);
    } catch (const Error&) {
      break;
    }
    if (!chain.passed_geweke) {
      if (attempt + 1 < s.geweke_attempts) ++out.geweke_reruns;
      continue;
    }
    const PosteriorSummary ps = summarize(chain, s.ci_level);
    out.estimates[2] = PointEstimate{ps.median, ps.ci_beta, ps.ci_theta};
    break;
  }
  if (!out.estimates[2]) out.geweke_failed = true;
  return out;
}

SimReport run_scenario(const SimScenario& s, const ReplicateEstimator& estimator) {
  s.validate();
  const std::size_t per_n = static_cast<std::size_t>(s.replicates);
  const std::size_t total = per_n * s.n_values.size();
  std::vector<ReplicateOutcome> outcomes(total);

  // Parallel map; outcome i is written only by the worker that claimed i.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const std::size_t k = i / per_n;
      const std::size_t r = i % per_n;
      try {
        const std::uint64_t seed = derive_seed(s.root_seed, {k, r});
        const Dataset sample =
            dhillon::sample(s.truth, static_cast<std::size_t>(s.n_values[k]), derive_seed(seed, {0xDA7A}));
        outcomes[i] = estimator(sample, seed, s);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned threads = s.threads ? s.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  // Sequential aggregation in replicate order.
  SimReport report;
  const double truth[2] = {s.truth.beta(), s.truth.theta()};
  for (std::size_t k = 0; k < s.n_values.size(); ++k) {
    const int n = s.n_values[k];
    SimCounts counts{n};
    for (std::size_t r = 0; r < per_n; ++r) {
      const auto& o = outcomes[k * per_n + r];
      counts.mom_infeasible += o.mom_infeasible;
      counts.mle_not_converged += o.mle_not_converged;
      counts.geweke_fail += o.geweke_failed;
      counts.geweke_reruns += o.geweke_reruns;
    }
    report.counts.push_back(counts);

    for (int e = 0; e < 3; ++e) {
      for (int p = 0; p < 2; ++p) {
        std::vector<double> values;
        int covered = 0, with_ci = 0;
        for (std::size_t r = 0; r < per_n; ++r) {
          const auto& est = outcomes[k * per_n + r].estimates[e];
          if (!est) continue;
          values.push_back(est->value(p));
          const auto& ci = p == 0 ? est->ci_beta : est->ci_theta;
          if (ci) {
            ++with_ci;
            covered += ci->contains(truth[p]);
          }
        }
        SimRow row{static_cast<Estimator>(e), static_cast<Parameter>(p), n, kNaN, kNaN, std::nullopt,
                   static_cast<int>(values.size())};
        if (!values.empty()) std::tie(row.bias, row.mse) = bias_mse(values, truth[p]);
        if (with_ci > 0) row.cp = static_cast<double>(covered) / with_ci;
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

std::string sim_report_csv(const SimReport& r) {
  std::string out = "estimator,parameter,n,bias,mse,cp\n";
  for (const auto& row : r.rows) {
    out += std::string(to_string(row.estimator)) + "," + to_string(row.parameter) + "," + std::to_string(row.n) +
           "," + fmt("%.17g", row.bias) + "," + fmt("%.17g", row.mse) + "," + (row.cp ? fmt("%.17g", *row.cp) : "") +
           "\n";
  }
  return out;
}

std::string sim_report_table(const SimReport& r) {
  std::vector<int> ns;
  for (const auto& c : r.counts) ns.push_back(c.n);
  auto cell = [](double v) { return fmt("%9.4g", v); };
  std::string out = "Parameter     n |        MM (Bias, MSE) |        MLE (Bias, MSE, CP%) |      Bayes (Bias, MSE, CP%)\n";
  for (Parameter p : {Parameter::Beta, Parameter::Theta}) {
    for (int n : ns) {
      char head[32];
      std::snprintf(head, sizeof head, "%-9s %5d |", to_string(p), n);
      out += head;
      for (Estimator e : {Estimator::MM, Estimator::MLE, Estimator::Bayes}) {
        const SimRow* row = r.find(e, p, n);
        out += " " + cell(row ? row->bias : kNaN) + " " + cell(row ? row->mse : kNaN);
        if (e != Estimator::MM) out += " " + ((row && row->cp) ? cell(100.0 * *row->cp) : std::string("        -"));
        out += " |";
      }
      out.pop_back();
      out += "\n";
    }
  }
  out += "\nExclusions per n (MoM infeasible / MLE not converged / Geweke failed after reruns / reruns):\n";
  for (const auto& c : r.counts) {
    out += "  n=" + std::to_string(c.n) + ": " + std::to_string(c.mom_infeasible) + " / " +
           std::to_string(c.mle_not_converged) + " / " + std::to_string(c.geweke_fail) + " / " +
           std::to_string(c.geweke_reruns) + "\n";
  }
  return out;
}

}  // namespace dhillon
