#pragma once

#include "symbio/analysis.hpp"
#include "symbio/baselines.hpp"
#include "symbio/genetic.hpp"
#include "symbio/gp_config.hpp"
#include "symbio/metrics.hpp"

#include <json.hpp>

namespace symbio {

[[nodiscard]] auto to_json(const MetricReport& m) -> nlohmann::json;
// Result-affecting fields only; n_jobs is omitted.
[[nodiscard]] auto to_json(const GPConfig& cfg) -> nlohmann::json;
[[nodiscard]] auto to_json(const EvolutionHistory& h) -> nlohmann::json;
[[nodiscard]] auto to_json(const FeatureCountRanking& r) -> nlohmann::json;
[[nodiscard]] auto to_json(const LengthStats& s) -> nlohmann::json;
[[nodiscard]] auto to_json(const std::vector<FeatureClassSummary>& s) -> nlohmann::json;
[[nodiscard]] auto to_json(const DistillationResult& d) -> nlohmann::json;

// rank,feature,count
[[nodiscard]] auto ranking_csv(const FeatureCountRanking& r) -> std::string;
// feature,class,mean,stddev
[[nodiscard]] auto summary_csv(const std::vector<FeatureClassSummary>& s) -> std::string;

// Population mean and stddev.
struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;
};
[[nodiscard]] auto mean_std(const std::vector<double>& values) -> MeanStd;

} // namespace symbio
