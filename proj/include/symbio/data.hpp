#pragma once

#include "symbio/expr.hpp"
#include "symbio/rng.hpp"
#include "symbio/table.hpp"

#include <string>
#include <utility>
#include <vector>

namespace symbio {

inline constexpr double kRowTotal = 100.0;

struct Normalized {
    AbundanceTable table;
    // One entry per all-zero row, which is left as zeros.
    std::vector<std::string> warnings;
};

// Scales each row to sum to 100.
[[nodiscard]] auto normalize_rows(const AbundanceTable& table) -> Normalized;

// Keeps every minority-class row and an equal-size uniform sample of the
// majority class, in original row order. Throws StateError without labels or
// when a class is empty.
[[nodiscard]] auto undersample_balance(const AbundanceTable& table, Rng& rng) -> AbundanceTable;

struct SplitSpec {
    double test_fraction = 0.25;
    bool stratified = true;
};

struct Split {
    AbundanceTable train;
    AbundanceTable test;
    // Row indices into the input table, ascending.
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
};

// round(fraction * N) rows go to test, apportioned across classes by largest
// remainder (ties to healthy) so each class contributes floor or ceil of its
// exact share. ConfigError when either side would be empty. `labels` drives
// stratification.
[[nodiscard]] auto split(const AbundanceTable& table, const Labels& labels, const SplitSpec& spec, Rng& rng) -> Split;
[[nodiscard]] auto split(const AbundanceTable& table, const SplitSpec& spec, Rng& rng) -> Split;

struct PlantedSpec {
    std::size_t n_samples = 2000;
    std::size_t n_features = 50;
    double zero_probability = 0.7;
    double max_value = 10.0;
    double noise = 0.0;
};

// Sparse rows (cell zero with probability 0.7, else uniform (0, 10]),
// normalized to 100, label = rule(row) > 0.5, then each label flipped with
// probability `noise`. The rule's S-expression is stored as metadata "rule".
[[nodiscard]] auto synth_planted(const PlantedSpec& spec, const ExprNode& rule, Rng& rng) -> AbundanceTable;

} // namespace symbio
