#pragma once

#include "symbio/data.hpp"
#include "symbio/expr.hpp"
#include "symbio/genetic.hpp"
#include "symbio/gp_config.hpp"
#include "symbio/rng.hpp"
#include "symbio/table.hpp"

#include <functional>
#include <string>
#include <vector>

namespace symbio {

struct FeatureCount {
    std::string feature;
    std::size_t count = 0;

    friend auto operator==(const FeatureCount&, const FeatureCount&) -> bool = default;
};

// Descending by count, ties by name.
using FeatureCountRanking = std::vector<FeatureCount>;

enum class CountMode {
    // Every feature node counts.
    Occurrences,
    // At most one per expression.
    PerExpression,
};

[[nodiscard]] auto feature_counts(const std::vector<ExprNode>& exprs, const std::vector<std::string>& feature_names,
                                  CountMode mode = CountMode::Occurrences) -> FeatureCountRanking;

struct LengthStats {
    double mean = 0.0;
    double stddev = 0.0; // population
    std::vector<std::size_t> sizes;
};

// Throws DimensionError on an empty list.
[[nodiscard]] auto length_stats(const std::vector<ExprNode>& exprs) -> LengthStats;

struct FeatureClassSummary {
    std::string feature;
    int label = 0;
    std::size_t n = 0;
    double mean = 0.0;
    double stddev = 0.0; // population
};

// Rows ordered by requested feature, then healthy before CRC. An empty class
// reports n = 0 with zero mean and stddev.
[[nodiscard]] auto feature_summary(const AbundanceTable& table, const Labels& labels,
                                   const std::vector<std::string>& features) -> std::vector<FeatureClassSummary>;

// Fraction of rows where predict_label(student) equals the teacher label.
[[nodiscard]] auto fidelity(const ExprNode& student, const Labels& teacher_labels, const AbundanceTable& table)
    -> double;

struct HoldoutFit {
    EvolutionResult evolution;
    Split split;
    // Predicted test labels of the best individual.
    Labels test_predictions;
    double test_agreement = 0.0;
};

// Invoked with the table handed to the evolutionary search.
using FitObserver = std::function<void(const AbundanceTable&)>;

// Stratified split of `table` by `targets` (drawn from rng first), evolve on
// the train side with rng, score agreement with `targets` on the test side.
[[nodiscard]] auto fit_with_holdout(const AbundanceTable& table, const Labels& targets, const GPConfig& cfg,
                                    const SplitSpec& spec, Rng& rng, const FitObserver& observer = {}) -> HoldoutFit;

struct DistillationResult {
    Individual student;
    double fidelity = 0.0;
    std::string teacher_source;
    GPConfig config_echo;
    EvolutionHistory history;
    std::vector<std::string> train_ids;
    std::vector<std::string> holdout_ids;
};

// Evolves a student on teacher labels and measures fidelity on a held-out
// stratified quarter that the search never sees.
[[nodiscard]] auto distill(const AbundanceTable& table, const Labels& teacher_labels, const GPConfig& cfg, Rng& rng,
                           std::string teacher_source = "teacher", const FitObserver& observer = {})
    -> DistillationResult;

} // namespace symbio
