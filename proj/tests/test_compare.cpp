#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "dhillon/compare.hpp"
#include "dhillon/distribution.hpp"
#include "dhillon/errors.hpp"
#include "dhillon/registry.hpp"
#include "dhillon/rng.hpp"

using namespace dhillon;

namespace {

Dataset exponential_sample(int n, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> t(n);
  for (auto& v : t) v = e(rng);
  return Dataset(std::move(t));
}

const CriteriaRow& row_for(const std::vector<CriteriaRow>& rows, const std::string& model) {
  return *std::find_if(rows.begin(), rows.end(), [&](const CriteriaRow& r) { return r.model == model; });
}

}  // namespace

TEST_CASE("fit_weibull") {
  const Dataset d = exponential_sample(10000, 314);
  const WeibullFit f = fit_weibull(d);
  // Asymptotic SE of the shape at k = 1: sqrt(6) / (pi sqrt(n)).
  const double se = std::sqrt(6.0) / (std::numbers::pi * 100.0);
  CHECK(std::abs(f.params.shape - 1.0) < 3.0 * se);
  CHECK(weibull_score(f.params, d).norm() < 1e-6);

  double direct = 0.0;
  for (double t : d.times()) {
    const double k = f.params.shape, l = f.params.scale;
    direct += std::log(k / l) + (k - 1.0) * std::log(t / l) - std::pow(t / l, k);
  }
  CHECK(std::abs(f.loglik - direct) < 1e-10 * std::abs(direct));

  CHECK_THROWS_AS(fit_weibull(Dataset({2.0, 2.0, 2.0})), DegenerateData);
  CHECK_THROWS_AS(fit_weibull(Dataset({2.0})), DegenerateData);
}

TEST_CASE("fit_gamma") {
  const Dataset d = exponential_sample(10000, 2718);
  const GammaFit f = fit_gamma(d);
  // Asymptotic SE of the shape at alpha = 1: 1 / sqrt(n (pi^2/6 - 1)).
  const double se = 1.0 / std::sqrt(1e4 * (std::numbers::pi * std::numbers::pi / 6.0 - 1.0));
  CHECK(std::abs(f.params.shape - 1.0) < 3.0 * se);
  CHECK(gamma_score(f.params, d).norm() < 1e-6 * d.size());

  double direct = 0.0;
  for (double t : d.times()) {
    const double a = f.params.shape, r = f.params.rate;
    direct += a * std::log(r) + (a - 1.0) * std::log(t) - r * t - std::lgamma(a);
  }
  CHECK(std::abs(f.loglik - direct) < 1e-10 * std::abs(direct));

  CHECK_THROWS_AS(fit_gamma(Dataset({2.0, 2.0, 2.0})), DegenerateData);
}

TEST_CASE("scores match finite differences") {
  const Dataset d({0.4, 1.1, 2.5, 3.2, 0.9});
  const WeibullParams w{1.7, 1.9};
  const double h = 1e-6;
  const Eigen::Vector2d sw = weibull_score(w, d);
  CHECK(sw(0) == doctest::Approx((weibull_log_likelihood({w.shape + h, w.scale}, d) -
                                  weibull_log_likelihood({w.shape - h, w.scale}, d)) / (2 * h)).epsilon(1e-6));
  CHECK(sw(1) == doctest::Approx((weibull_log_likelihood({w.shape, w.scale + h}, d) -
                                  weibull_log_likelihood({w.shape, w.scale - h}, d)) / (2 * h)).epsilon(1e-6));
  const GammaParams g{2.3, 1.4};
  const Eigen::Vector2d sg = gamma_score(g, d);
  CHECK(sg(0) == doctest::Approx((gamma_log_likelihood({g.shape + h, g.rate}, d) -
                                  gamma_log_likelihood({g.shape - h, g.rate}, d)) / (2 * h)).epsilon(1e-6));
  CHECK(sg(1) == doctest::Approx((gamma_log_likelihood({g.shape, g.rate + h}, d) -
                                  gamma_log_likelihood({g.shape, g.rate - h}, d)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("criteria") {
  const CriteriaRow r = criteria(-193.93, 2, 62);
  CHECK(r.aic == doctest::Approx(391.86).epsilon(1e-12));
  CHECK(r.aicc - r.aic == doctest::Approx(12.0 / 59.0).epsilon(1e-12));
  CHECK(r.bic == doctest::Approx(387.86 + 2.0 * std::log(62.0)).epsilon(1e-12));
  const CriteriaRow zero = criteria(0.0, 0, 10);
  CHECK(zero.aic == 0.0);
  CHECK(zero.bic == 0.0);
  CHECK_THROWS_AS(criteria(-1.0, 2, 3), DomainError);
  CHECK_NOTHROW(criteria(-1.0, 2, 4));
}

TEST_CASE("AIC ranking is shift invariant") {
  const std::vector<double> ll{-120.4, -118.9, -125.0};
  const std::vector<int> ks{2, 3, 1};
  auto order = [&](double shift) {
    std::vector<int> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return criteria(ll[a] + shift, ks[a], 50).aic < criteria(ll[b] + shift, ks[b], 50).aic;
    });
    return idx;
  };
  CHECK(order(0.0) == order(37.5));
  CHECK(order(0.0) == order(-1e3));
}

TEST_CASE("empirical_survival") {
  const SurvivalSeries s = empirical_survival(Dataset({3.0, 1.0, 2.0}));
  CHECK(s.kind == SurvivalSeries::Kind::Empirical);
  REQUIRE(s.points.size() == 4);
  CHECK(s.points[0] == std::pair{0.0, 1.0});
  CHECK(s.points[1].first == 1.0);
  CHECK(s.points[1].second == doctest::Approx(2.0 / 3.0));
  CHECK(s.points[2].second == doctest::Approx(1.0 / 3.0));
  CHECK(s.points[3].second == 0.0);

  const SurvivalSeries single = empirical_survival(Dataset({5.0}));
  CHECK(single.points.back() == std::pair{5.0, 0.0});

  const SurvivalSeries ties = empirical_survival(Dataset({1.0, 1.0, 2.0, 2.0}));
  REQUIRE(ties.points.size() == 3);
  CHECK(ties.points[1].second == 0.5);

  const SurvivalSeries diesel = empirical_survival(*builtin_dataset("diesel_engine"));
  CHECK(diesel.points.back().first == 59.0);
  CHECK(diesel.points.back().second == 0.0);
  for (std::size_t i = 1; i < diesel.points.size(); ++i) {
    CHECK(diesel.points[i].second <= diesel.points[i - 1].second);
    CHECK(diesel.points[i].first > diesel.points[i - 1].first);
  }
}

TEST_CASE("compare on the built-in datasets") {
  for (const char* name : {"diesel_engine", "line_divider"}) {
    const Dataset d = *builtin_dataset(name);
    const auto rows = compare(d);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].model == "Dhillon");
    for (const auto& r : rows) {
      INFO(name << " " << r.model);
      REQUIRE(r.ok);
      CHECK(r.aic == -2.0 * r.loglik + 2.0 * r.k);
      CHECK(r.bic == -2.0 * r.loglik + r.k * std::log(static_cast<double>(d.size())));
      CHECK(r.aicc == r.aic + 2.0 * r.k * (r.k + 1.0) / (d.size() - r.k - 1.0));
    }
    CHECK(std::is_sorted(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.aic < b.aic; }));
  }
  const auto diesel = compare(*builtin_dataset("diesel_engine"));
  CHECK(row_for(diesel, "Dhillon").aic < row_for(diesel, "Weibull").aic);

  CHECK_THROWS_AS(compare(Dataset({1.0, 2.0})), DomainError);
}

TEST_CASE("a failed fit is kept and ranked last") {
  // The Dhillon likelihood cannot be evaluated from its starting point here.
  const auto rows = compare(Dataset({1e-308, 1e-308, 1e-308, 1e308}));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].ok);
  CHECK(rows[1].ok);
  CHECK_FALSE(rows[2].ok);
  CHECK(rows[2].model == "Dhillon");
  CHECK(std::isnan(rows[2].aic));
  CHECK(rows[2].error.find("fit_mle") != std::string::npos);
}

TEST_CASE("three observations leave AICc undefined") {
  const auto rows = compare(Dataset({0.5, 1.0, 4.0}));
  for (const auto& r : rows) {
    INFO(r.model);
    CHECK(r.ok);
    CHECK(std::isfinite(r.aic));
    CHECK(r.bic == -2.0 * r.loglik + 2.0 * std::log(3.0));
    CHECK(std::isnan(r.aicc));
  }
}

TEST_CASE("near-tied and wide-range data still fit") {
  std::vector<double> ties(9, 1.0);
  ties.push_back(1.0000001);
  for (const auto& d : {Dataset(ties), Dataset({1e-300, 1e-300, 1.0, 1e300})}) {
    for (const auto& r : compare(d)) {
      INFO(r.model << ": " << r.error);
      CHECK(r.ok);
    }
  }
  const GammaFit g = fit_gamma(Dataset(ties));
  CHECK(g.params.shape > 1e12);
}

TEST_CASE("parametric survival curves") {
  const Dataset d = *builtin_dataset("line_divider");
  const auto rows = compare(d);
  const std::vector<double> grid{0.0, 1.0, 5.0, 10.0, 34.0};
  const auto curves = parametric_survival(rows, grid);
  REQUIRE(curves.size() == 3);
  for (const auto& c : curves) {
    INFO(c.model);
    CHECK(c.kind == SurvivalSeries::Kind::Parametric);
    CHECK(c.points.front().second == 1.0);
    for (std::size_t i = 1; i < c.points.size(); ++i) CHECK(c.points[i].second < c.points[i - 1].second);
  }
  const auto& dh = row_for(rows, "Dhillon");
  const DhillonParams p(dh.params.at("beta"), dh.params.at("theta"));
  const auto& dc = *std::find_if(curves.begin(), curves.end(), [](const auto& c) { return c.model == "Dhillon"; });
  CHECK(dc.points[2].second == survival(p, 5.0));
  // Gamma with shape 1 reduces to the exponential.
  const std::vector<CriteriaRow> expo{{"Gamma", 2, 0.0, 0.0, 0.0, 0.0, {{"shape", 1.0}, {"rate", 0.5}}, true, ""}};
  const auto ec = parametric_survival(expo, {3.0});
  CHECK(ec[0].points[0].second == doctest::Approx(std::exp(-1.5)).epsilon(1e-9));
}

TEST_CASE("Dhillon usually wins on its own data") {
  int first = 0;
  for (std::uint64_t r = 0; r < 200; ++r) {
    const Dataset d = sample(DhillonParams(4.0, 2.0), 500, derive_seed(77, {r}));
    first += compare(d).front().model == "Dhillon";
  }
  MESSAGE("Dhillon ranked first in " << first << " of 200");
  CHECK(first >= 160);
}
