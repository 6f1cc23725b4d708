#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dhillon/bayes.hpp"
#include "dhillon/compare.hpp"
#include "dhillon/mle.hpp"
#include "dhillon/simstudy.hpp"

namespace dhillon {

using nlohmann::json;

void to_json(json& j, const DhillonParams& p);
void to_json(json& j, const Interval& i);
void to_json(json& j, const FisherInfo& f);
void to_json(json& j, const MleFit& f);
void to_json(json& j, const MomEstimate& m);
void to_json(json& j, const ValidityReport& v);
void to_json(json& j, const PosteriorSummary& s);
void to_json(json& j, const PredictiveSummary& s);
void to_json(json& j, const CriteriaRow& r);
void to_json(json& j, const SimRow& r);
void to_json(json& j, const SimCounts& c);
void to_json(json& j, const SimReport& r);

/// Chain diagnostics without the draws.
json chain_diagnostics(const McmcChain& c);

struct RunManifest {
  std::string command;
  std::uint64_t seed;
  json config;
  std::string tool_version;
  /// ISO 8601 UTC; taken from SOURCE_DATE_EPOCH when that is set.
  std::string timestamp;

  static RunManifest make(std::string command, std::uint64_t seed, json config);
};

void to_json(json& j, const RunManifest& m);

/// Shortest round-trip representation.
std::string format_full(double v);
/// Four significant figures.
std::string format_sig4(double v);

std::string chain_csv(const McmcChain& c);
std::string times_csv(std::span<const double> times);
std::string survival_csv(const std::vector<SurvivalSeries>& series);

std::string text_mle(const MleFit& f, const std::string& unit);
std::string text_mom(const MomEstimate& m);
std::string text_bayes(const PosteriorSummary& s, const McmcChain& c, const ValidityReport& v);
std::string text_predictive(const PredictiveSummary& s, const std::string& unit);
std::string text_criteria(const std::vector<CriteriaRow>& rows, std::size_t n);

}  // namespace dhillon
