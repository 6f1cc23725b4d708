#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "dhillon/bayes.hpp"
#include "dhillon/distribution.hpp"
#include "dhillon/errors.hpp"
#include "dhillon/registry.hpp"

namespace fs = std::filesystem;
using namespace dhillon;
using json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"dhillon"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : owned) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dhillon_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

// Every regular file in both directories, byte for byte.
bool same_tree(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename());
  std::size_t count_b = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++count_b;
  if (names.empty() || names.size() != count_b) return false;
  for (const auto& n : names) {
    if (!fs::exists(b / n) || slurp(a / n) != slurp(b / n)) return false;
  }
  return true;
}

const std::string kQuickMcmc = "--iterations=1100";

struct EpochGuard {
  EpochGuard() { ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1); }
  ~EpochGuard() { ::unsetenv("SOURCE_DATE_EPOCH"); }
};

}  // namespace

TEST_CASE("built-in datasets") {
  const auto names = builtin_names();
  CHECK(names == std::vector<std::string>{"diesel_engine", "line_divider"});
  const Dataset diesel = *builtin_dataset("diesel_engine");
  CHECK(diesel.size() == 62);
  CHECK(diesel.min() == 1.0);
  CHECK(diesel.max() == 59.0);
  const Dataset divider = *builtin_dataset("line_divider");
  CHECK(divider.size() == 82);
  CHECK(divider.min() == 1.0);
  CHECK(divider.max() == 34.0);
  CHECK_FALSE(builtin_dataset("nope").has_value());
}

TEST_CASE("CSV ingestion") {
  CHECK(parse_times_csv("1.5\n2\n3e0\n").size() == 3);
  const Dataset headed = parse_times_csv("time\n0.5\n\n4\n");
  REQUIRE(headed.size() == 2);
  CHECK(headed.times()[1] == 4.0);
  CHECK(parse_times_csv("time\r\n1\r\n2\r\n").size() == 2);

  auto message = [](const std::string& text) {
    try {
      parse_times_csv(text);
    } catch (const DomainError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("time\n1\n-2\n").find("row 3") != std::string::npos);
  CHECK(message("1\n0\n").find("row 2") != std::string::npos);
  CHECK(message("1\nnan\n").find("row 2") != std::string::npos);
  CHECK(message("1\ninf\n").find("row 2") != std::string::npos);
  CHECK(message("abc\n").find("row 1") != std::string::npos);
  CHECK(message("1,2\n").find("single column") != std::string::npos);
  CHECK_FALSE(message("").empty());

  const fs::path dir = fresh_dir("csv");
  const fs::path file = write_file(dir, "t.csv", "time\n1\n2\n3\n");
  CHECK(resolve_dataset(file.string()).size() == 3);
  CHECK(resolve_dataset("diesel_engine").size() == 62);
  CHECK_THROWS_AS(resolve_dataset((dir / "missing.csv").string()), DomainError);
}

TEST_CASE("fit writes reports") {
  EpochGuard epoch;
  const fs::path dir = fresh_dir("fit");
  const Result r = run({"--out-dir", dir.string(), "--format", "json", "fit", "--data", "diesel_engine"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(slurp(dir / "fit_mle.json"));
  CHECK(doc["mle"]["params"]["beta"].get<double>() == doctest::Approx(1.3441).epsilon(1e-4));
  CHECK(doc["manifest"]["command"] == "fit");
  CHECK(doc["manifest"]["seed"] == 1);
  CHECK(json::parse(r.out) == doc);
  CHECK(fs::exists(dir / "fit_mle.txt"));

  const Result bayes = run({"--out-dir", dir.string(), "--seed", "7", "fit", "--data", "diesel_engine", "--method",
                            "bayes", "--chain-csv", (dir / "chain.csv").string()});
  REQUIRE(bayes.code == 0);
  const json b = json::parse(slurp(dir / "fit_bayes.json"));
  CHECK(b["validity"]["posterior_proper"] == true);
  CHECK(b["chain"].contains("passed_geweke"));
  const std::string chain = slurp(dir / "chain.csv");
  CHECK(chain.rfind("iter,beta,theta\n", 0) == 0);
  CHECK(std::count(chain.begin(), chain.end(), '\n') == 1001);

  const Result mom = run({"--out-dir", dir.string(), "--format", "csv", "fit", "--data", "line_divider", "--method", "mom"});
  CHECK(mom.code == 0);
  CHECK(fs::exists(dir / "fit_mom.json"));
}

TEST_CASE("exit codes") {
  const fs::path dir = fresh_dir("codes");
  const std::string od = dir.string();
  const fs::path bad = write_file(dir, "bad.csv", "time\n3\n-1\n");
  const fs::path one = write_file(dir, "one.csv", "5\n");
  const fs::path equal = write_file(dir, "equal.csv", "2\n2\n2\n");

  CHECK(run({"--help"}).code == 0);
  CHECK(run({}).code == 2);
  CHECK(run({"--out-dir", od, "fit"}).code == 2);
  CHECK(run({"--out-dir", od, "fit", "--data", "diesel_engine", "--method", "magic"}).code == 2);

  const Result neg = run({"--out-dir", od, "fit", "--data", bad.string()});
  CHECK(neg.code == 2);
  CHECK(neg.err.find("row 3") != std::string::npos);

  const Result mdip = run({"--out-dir", od, "fit", "--data", "diesel_engine", "--method", "bayes", "--prior", "mdip"});
  CHECK(mdip.code == 3);
  CHECK_FALSE(mdip.err.empty());

  CHECK(run({"--out-dir", od, "fit", "--data", one.string(), "--method", "bayes"}).code == 3);
  CHECK(run({"--out-dir", od, "fit", "--data", equal.string(), "--method", "bayes"}).code == 3);
  CHECK(run({"--out-dir", od, "predict", "--data", one.string()}).code == 3);
  CHECK(run({"--out-dir", od, "fit", "--data", one.string()}).code == 2);
  CHECK(run({"--out-dir", od, "fit", "--data", equal.string()}).code == 2);
  CHECK(run({"--out-dir", od, "fit", "--data", equal.string(), "--method", "mom"}).code == 2);

  CHECK(run({"--out-dir", od, "sample", "--beta", "2", "--theta", "4", "--n", "0"}).code == 2);
  CHECK(run({"--out-dir", od, "sample", "--beta", "-2", "--theta", "4", "--n", "3"}).code == 2);
  CHECK(run({"--out-dir", od, "sample", "--beta", "2", "--theta", "0", "--n", "3"}).code == 2);
  CHECK(run({"--out-dir", od, "compare", "--data", one.string()}).code == 2);
  CHECK(run({"--out-dir", od, "simulate", "--n-values", "1,20", "--replicates", "2"}).code == 2);
  CHECK(run({"--out-dir", od, "simulate", "--replicates", "0"}).code == 2);
}

TEST_CASE("sample") {
  const fs::path dir = fresh_dir("sample");
  REQUIRE(run({"--out-dir", dir.string(), "--seed", "42", "sample", "--beta", "2", "--theta", "4", "--n", "1"}).code == 0);
  const std::string csv = slurp(dir / "sample.csv");
  const Dataset expect = sample(DhillonParams(2.0, 4.0), 1, 42);
  CHECK(parse_times_csv(csv).times()[0] == expect.times()[0]);
  CHECK(csv.rfind("time\n", 0) == 0);
  // The median of (2, 4) is 0.5, which is where U = 0.5 lands.
  CHECK(quantile(DhillonParams(2.0, 4.0), 0.5) == doctest::Approx(0.5).epsilon(1e-15));

  const fs::path custom = dir / "nested" / "draws.csv";
  REQUIRE(run({"--out-dir", dir.string(), "sample", "--beta", "2", "--theta", "4", "--n", "5", "--out", custom.string()}).code == 0);
  CHECK(parse_times_csv(slurp(custom)).size() == 5);
}

TEST_CASE("compare") {
  const fs::path dir = fresh_dir("compare");
  REQUIRE(run({"--out-dir", dir.string(), "compare", "--data", "line_divider", "--grid-points", "11"}).code == 0);
  const json doc = json::parse(slurp(dir / "compare.json"));
  CHECK(doc["rows"][0]["model"] == "Dhillon");
  CHECK(doc["models_not_fitted"].size() == 4);
  const std::string text = slurp(dir / "compare.txt");
  CHECK(text.find("EEG") != std::string::npos);
  CHECK(text.find("BIC") < text.find("AIC"));
  const std::string csv = slurp(dir / "survival.csv");
  CHECK(csv.rfind("model,t,s\n", 0) == 0);
  CHECK(csv.find("Dhillon,0,1\n") != std::string::npos);
  CHECK(csv.find("empirical,0,1\n") != std::string::npos);
}

TEST_CASE("predict and the single-draw chain") {
  const fs::path dir = fresh_dir("predict");
  REQUIRE(run({"--out-dir", dir.string(), "predict", "--data", "diesel_engine", kQuickMcmc, "--burn-in=100",
               "--thin=1"}).code == 0);
  const json doc = json::parse(slurp(dir / "predict.json"));
  const double lo = doc["predictive"]["interval"][0], hi = doc["predictive"]["interval"][1];
  CHECK(lo < doc["predictive"]["median"].get<double>());
  CHECK(doc["predictive"]["median"].get<double>() < hi);
  CHECK(parse_times_csv(slurp(dir / "predictive.csv")).size() == 1000);

  // A chain stuck at one draw turns uniforms into that component's quantiles.
  McmcChain single;
  single.draws.resize(3, 2);
  single.draws.col(0).setConstant(1.7);
  single.draws.col(1).setConstant(0.3);
  const DhillonParams p(1.7, 0.3);
  const std::vector<double> u{0.025, 0.5, 0.975};
  const std::vector<double> draws = posterior_predictive(single, u);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(draws[i] == doctest::Approx(quantile(p, u[i])).epsilon(1e-14));
}

TEST_CASE("identical invocations give identical files") {
  EpochGuard epoch;
  const std::vector<std::vector<std::string>> commands{
      {"fit", "--data", "diesel_engine"},
      {"fit", "--data", "diesel_engine", "--method", "bayes", kQuickMcmc, "--burn-in=100"},
      {"fit", "--data", "line_divider", "--method", "mom"},
      {"sample", "--beta", "3", "--theta", "0.5", "--n", "50"},
      {"compare", "--data", "diesel_engine"},
      {"predict", "--data", "line_divider", kQuickMcmc, "--burn-in=100"},
      {"simulate", "--n-values", "20", "--replicates", "3", "--threads", "2", kQuickMcmc, "--burn-in=100"},
  };
  int i = 0;
  for (const auto& cmd : commands) {
    const fs::path a = fresh_dir("det_a" + std::to_string(i)), b = fresh_dir("det_b" + std::to_string(i));
    ++i;
    auto invoke = [&](const fs::path& dir) {
      std::vector<std::string> owned{"dhillon", "--seed", "13", "--out-dir", dir.string()};
      owned.insert(owned.end(), cmd.begin(), cmd.end());
      std::vector<const char*> argv;
      for (const auto& s : owned) argv.push_back(s.c_str());
      std::ostringstream out, err;
      return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    };
    INFO(cmd[0]);
    REQUIRE(invoke(a) == 0);
    REQUIRE(invoke(b) == 0);
    CHECK(same_tree(a, b));
  }
}
