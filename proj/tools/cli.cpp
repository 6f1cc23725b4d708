#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "dhillon/errors.hpp"
#include "dhillon/registry.hpp"
#include "dhillon/rng.hpp"
#include "report.hpp"

namespace dhillon::cli {

namespace {

namespace fs = std::filesystem;

struct Globals {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string format = "text";
};

struct McmcFlags {
  int iterations = 5500;
  int burn_in = 500;
  int thin = 5;
  double a_beta = 50.0;
  double a_theta = 50.0;

  void add_to(CLI::App* app) {
    app->add_option("--iterations", iterations, "Total MCMC iterations")->capture_default_str();
    app->add_option("--burn-in", burn_in, "Burn-in iterations (proposal tuning happens here)")->capture_default_str();
    app->add_option("--thin", thin, "Keep every thin-th post-burn-in draw")->capture_default_str();
    app->add_option("--a-beta", a_beta, "Initial Gamma proposal shape for beta")->capture_default_str();
    app->add_option("--a-theta", a_theta, "Initial Gamma proposal shape for theta")->capture_default_str();
  }

  McmcConfig config(std::uint64_t seed) const {
    McmcConfig c;
    c.iterations = iterations;
    c.burn_in = burn_in;
    c.thin = thin;
    c.a_beta = a_beta;
    c.a_theta = a_theta;
    c.seed = seed;
    c.validate();
    return c;
  }

  json snapshot() const {
    return {{"iterations", iterations}, {"burn_in", burn_in}, {"thin", thin}, {"a_beta", a_beta}, {"a_theta", a_theta}};
  }
};

struct FitFlags {
  std::string data;
  std::string method = "mle";
  std::string prior = "jeffreys";
  std::string chain_csv;
  double level = 0.95;
  McmcFlags mcmc;
};

struct SampleFlags {
  double beta = 0.0;
  double theta = 0.0;
  long long n = 0;
  std::string out;
};

struct SimulateFlags {
  double beta = 4.0;
  double theta = 2.0;
  std::vector<int> n_values{20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120};
  int replicates = 1000;
  unsigned threads = 0;
  int geweke_attempts = 3;
  double level = 0.95;
  McmcFlags mcmc;
};

struct CompareFlags {
  std::string data;
  int grid_points = 200;
};

struct PredictFlags {
  std::string data;
  double level = 0.95;
  McmcFlags mcmc;
};

class Output {
 public:
  Output(const Globals& g, std::ostream& out) : g_(g), out_(out) {}

  void file(const std::string& name, const std::string& content) const { write(fs::path(g_.out_dir) / name, content); }

  static void write(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DomainError("cannot write " + path.string());
    f << content;
    if (!f) throw DomainError("failed writing " + path.string());
  }

  /// Writes <stem>.json and <stem>.txt, and echoes one of them (or `csv`) to stdout.
  void report(const std::string& stem, const json& doc, const std::string& text, const std::string& csv) const {
    const std::string json_text = doc.dump(2) + "\n";
    file(stem + ".json", json_text);
    file(stem + ".txt", text);
    if (g_.format == "json") {
      out_ << json_text;
    } else if (g_.format == "csv") {
      out_ << csv;
    } else {
      out_ << text;
    }
  }

 private:
  const Globals& g_;
  std::ostream& out_;
};

std::string estimate_csv(const std::vector<std::tuple<std::string, double, double, double>>& rows) {
  std::string out = "parameter,estimate,lower,upper\n";
  for (const auto& [name, est, lo, hi] : rows) {
    out += name + "," + format_full(est) + "," + format_full(lo) + "," + format_full(hi) + "\n";
  }
  return out;
}

int cmd_fit(const Globals& g, const FitFlags& f, const Output& o) {
  const Dataset d = resolve_dataset(f.data);
  json config = {{"data", f.data}, {"method", f.method}, {"level", f.level}, {"format", g.format}};
  if (f.method == "bayes") {
    config["prior"] = f.prior;
    config["mcmc"] = f.mcmc.snapshot();
  }
  const RunManifest manifest = RunManifest::make("fit", g.seed, config);
  json doc = {{"manifest", manifest}, {"dataset", {{"label", d.label()}, {"n", d.size()}, {"unit", d.unit()}}}};

  if (f.method == "mle") {
    const MleFit fit = fit_mle(d, f.level);
    doc["mle"] = fit;
    o.report("fit_mle", doc, text_mle(fit, d.unit()),
             estimate_csv({{"beta", fit.params.beta(), fit.ci_beta.lo, fit.ci_beta.hi},
                           {"theta", fit.params.theta(), fit.ci_theta.lo, fit.ci_theta.hi}}));
    return kOk;
  }
  if (f.method == "mom") {
    if (d.degenerate()) throw DegenerateData("method of moments: all observations are equal");
    const MomEstimate mom = fit_mom(d);
    doc["mom"] = mom;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    o.report("fit_mom", doc, text_mom(mom),
             mom.feasible ? estimate_csv({{"beta", mom.params->beta(), nan, nan},
                                          {"theta", mom.params->theta(), nan, nan}})
                          : estimate_csv({}));
    return mom.feasible ? kOk : kNotConverged;
  }

  const Prior prior = f.prior == "mdip" ? Prior::Mdip : Prior::JeffreysReference;
  const ValidityReport validity = check_validity(prior, d);
  const McmcChain chain = run_mh(prior, d, f.mcmc.config(g.seed));
  const PosteriorSummary summary = summarize(chain, f.level);
  doc["validity"] = validity;
  doc["posterior"] = summary;
  doc["chain"] = chain_diagnostics(chain);
  if (!f.chain_csv.empty()) Output::write(f.chain_csv, chain_csv(chain));
  o.report("fit_bayes", doc, text_bayes(summary, chain, validity),
           estimate_csv({{"beta", summary.median(0), summary.ci_beta.lo, summary.ci_beta.hi},
                         {"theta", summary.median(1), summary.ci_theta.lo, summary.ci_theta.hi}}));
  return kOk;
}

int cmd_sample(const Globals& g, const SampleFlags& f, const Output& o, std::ostream& out) {
  if (f.n < 1) throw DomainError("sample: --n must be at least 1");
  const DhillonParams p(f.beta, f.theta);
  const Dataset d = sample(p, static_cast<std::size_t>(f.n), g.seed);
  const std::string csv = times_csv(d.times());
  const json config = {{"beta", f.beta}, {"theta", f.theta}, {"n", f.n}, {"out", f.out}};
  const json doc = {{"manifest", RunManifest::make("sample", g.seed, config)}, {"params", p}, {"n", f.n}};
  if (f.out.empty()) {
    o.file("sample.csv", csv);
  } else {
    Output::write(f.out, csv);
  }
  o.file("sample.json", doc.dump(2) + "\n");
  if (g.format == "json") {
    out << doc.dump(2) << "\n";
  } else {
    out << csv;
  }
  return kOk;
}

int cmd_simulate(const Globals& g, const SimulateFlags& f, const Output& o) {
  SimScenario s;
  s.truth = DhillonParams(f.beta, f.theta);
  s.n_values = f.n_values;
  s.replicates = f.replicates;
  s.mcmc = f.mcmc.config(g.seed);
  s.ci_level = f.level;
  s.root_seed = g.seed;
  s.threads = f.threads;
  s.geweke_attempts = f.geweke_attempts;
  s.validate();
  const SimReport report = run_scenario(s);

  const json config = {{"beta", f.beta},           {"theta", f.theta},
                       {"n_values", f.n_values},   {"replicates", f.replicates},
                       {"threads", f.threads},     {"geweke_attempts", f.geweke_attempts},
                       {"level", f.level},         {"mcmc", f.mcmc.snapshot()}};
  const json doc = {{"manifest", RunManifest::make("simulate", g.seed, config)}, {"report", report}};
  const std::string csv = sim_report_csv(report);
  o.file("simulate.csv", csv);
  std::string text = "Simulation: beta = " + format_sig4(f.beta) + ", theta = " + format_sig4(f.theta) + ", " +
                     std::to_string(f.replicates) + " replicates per n\n" + sim_report_table(report);
  o.report("simulate", doc, text, csv);
  return kOk;
}

int cmd_compare(const Globals& g, const CompareFlags& f, const Output& o) {
  if (f.grid_points < 2) throw DomainError("compare: --grid-points must be at least 2");
  const Dataset d = resolve_dataset(f.data);
  const std::vector<CriteriaRow> rows = compare(d);

  std::vector<double> grid(static_cast<std::size_t>(f.grid_points));
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = d.max() * static_cast<double>(i) / (grid.size() - 1);
  std::vector<SurvivalSeries> series{empirical_survival(d)};
  for (auto& s : parametric_survival(rows, grid)) series.push_back(std::move(s));
  o.file("survival.csv", survival_csv(series));

  const json config = {{"data", f.data}, {"grid_points", f.grid_points}};
  const json doc = {{"manifest", RunManifest::make("compare", g.seed, config)},
                    {"dataset", {{"label", d.label()}, {"n", d.size()}, {"unit", d.unit()}}},
                    {"models_not_fitted", {"EEG", "WL", "GE", "EP"}},
                    {"rows", rows}};
  std::string csv = "model,k,loglik,bic,aic,aicc\n";
  for (const auto& r : rows) {
    csv += r.model + "," + std::to_string(r.k) + "," + format_full(r.loglik) + "," + format_full(r.bic) + "," +
           format_full(r.aic) + "," + format_full(r.aicc) + "\n";
  }
  o.report("compare", doc, text_criteria(rows, d.size()), csv);
  return kOk;
}

int cmd_predict(const Globals& g, const PredictFlags& f, const Output& o) {
  const Dataset d = resolve_dataset(f.data);
  const McmcChain chain = run_mh(Prior::JeffreysReference, d, f.mcmc.config(g.seed));
  const std::vector<double> draws = posterior_predictive(chain, derive_seed(g.seed, {1}));
  const PredictiveSummary summary = summarize_predictive(draws, f.level);
  o.file("predictive.csv", times_csv(draws));

  const json config = {{"data", f.data}, {"level", f.level}, {"mcmc", f.mcmc.snapshot()}};
  const json doc = {{"manifest", RunManifest::make("predict", g.seed, config)},
                    {"dataset", {{"label", d.label()}, {"n", d.size()}, {"unit", d.unit()}}},
                    {"chain", chain_diagnostics(chain)},
                    {"predictive", summary}};
  std::string text = text_predictive(summary, d.unit());
  if (!chain.passed_geweke) text += "  warning: the posterior chain failed the Geweke diagnostic\n";
  o.report("predict", doc, text,
           "statistic,value\nmean," + format_full(summary.mean) + "\nsd," + format_full(summary.sd) + "\nmedian," +
               format_full(summary.median) + "\nlower," + format_full(summary.interval.lo) + "\nupper," +
               format_full(summary.interval.hi) + "\n");
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dhillon lifetime distribution: estimation, Bayesian inference, simulation and model comparison"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Root random seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Directory for report files")->capture_default_str();
  app.add_option("--format", g.format, "Format echoed to stdout")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();

  const std::string data_help = "Builtin dataset (" + builtin_names()[0] + ", " + builtin_names()[1] +
                                ") or CSV path with one `time` column";

  FitFlags fit;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate (beta, theta) for a dataset");
  fit_cmd->add_option("--data", fit.data, data_help)->required();
  fit_cmd->add_option("--method", fit.method)->check(CLI::IsMember({"mle", "bayes", "mom"}))->capture_default_str();
  fit_cmd->add_option("--prior", fit.prior)->check(CLI::IsMember({"jeffreys", "mdip"}))->capture_default_str();
  fit_cmd->add_option("--chain-csv", fit.chain_csv, "Write retained draws (iter,beta,theta) here");
  fit_cmd->add_option("--level", fit.level, "Interval level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  fit.mcmc.add_to(fit_cmd);

  SampleFlags smp;
  auto* sample_cmd = app.add_subcommand("sample", "Draw failure times by inverse transform");
  sample_cmd->add_option("--beta", smp.beta)->required();
  sample_cmd->add_option("--theta", smp.theta)->required();
  sample_cmd->add_option("--n", smp.n)->required();
  sample_cmd->add_option("--out", smp.out, "CSV path (default <out-dir>/sample.csv)");

  SimulateFlags sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo bias/MSE/coverage study");
  sim_cmd->add_option("--beta", sim.beta)->capture_default_str();
  sim_cmd->add_option("--theta", sim.theta)->capture_default_str();
  sim_cmd->add_option("--n-values", sim.n_values, "Sample sizes")->delimiter(',');
  sim_cmd->add_option("--replicates", sim.replicates)->capture_default_str();
  sim_cmd->add_option("--threads", sim.threads, "0 uses every hardware thread")->capture_default_str();
  sim_cmd->add_option("--geweke-attempts", sim.geweke_attempts)->capture_default_str();
  sim_cmd->add_option("--level", sim.level)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  sim.mcmc.add_to(sim_cmd);

  CompareFlags cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Dhillon vs Weibull vs Gamma by information criteria");
  cmp_cmd->add_option("--data", cmp.data, data_help)->required();
  cmp_cmd->add_option("--grid-points", cmp.grid_points, "Points per parametric survival curve")
      ->capture_default_str();

  PredictFlags pred;
  auto* pred_cmd = app.add_subcommand("predict", "Posterior predictive distribution of a new lifetime");
  pred_cmd->add_option("--data", pred.data, data_help)->required();
  pred_cmd->add_option("--level", pred.level)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  pred.mcmc.add_to(pred_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    const Output o(g, out);
    if (*fit_cmd) return cmd_fit(g, fit, o);
    if (*sample_cmd) return cmd_sample(g, smp, o, out);
    if (*sim_cmd) return cmd_simulate(g, sim, o);
    if (*cmp_cmd) return cmd_compare(g, cmp, o);
    if (*pred_cmd) return cmd_predict(g, pred, o);
  } catch (const ImproperPosterior& e) {
    err << "error: " << e.what() << "\n";
    return kImproperPosterior;
  } catch (const NotConverged& e) {
    err << "error: " << e.what() << "\n";
    return kNotConverged;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

}  // namespace dhillon::cli
