#include "symbio/data.hpp"

#include "symbio/error.hpp"
#include "symbio/sexpr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace symbio {

auto normalize_rows(const AbundanceTable& table) -> Normalized
{
    Eigen::MatrixXd v = table.values();
    std::vector<std::string> warnings;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        const double total = v.row(i).sum();
        if (total <= 0.0) {
            warnings.push_back("sample '" + table.sample_ids()[static_cast<std::size_t>(i)]
                               + "' has no abundance; left as zeros");
            continue;
        }
        v.row(i) *= kRowTotal / total;
    }
    std::optional<Labels> labels;
    if (table.has_labels()) labels = table.labels();
    return {AbundanceTable(table.feature_names(), table.sample_ids(), std::move(v), std::move(labels),
                           table.metadata()),
            std::move(warnings)};
}

auto undersample_balance(const AbundanceTable& table, Rng& rng) -> AbundanceTable
{
    if (!table.has_labels()) throw StateError("undersampling requires labels");
    const auto& y = table.labels();
    const auto counts = class_counts(y);
    if (counts[0] == 0 || counts[1] == 0) {
        throw StateError("undersampling requires both classes; found " + std::to_string(counts[0]) + " healthy, "
                         + std::to_string(counts[1]) + " CRC");
    }
    if (counts[0] == counts[1]) return table;

    const int majority = counts[0] > counts[1] ? 0 : 1;
    const auto keep = std::min(counts[0], counts[1]);
    std::vector<std::size_t> majority_rows;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == majority) majority_rows.push_back(i);
    }
    std::vector<char> selected(y.size(), 0);
    for (auto k : rng.sample_without_replacement(majority_rows.size(), keep)) selected[majority_rows[k]] = 1;

    std::vector<std::size_t> rows;
    rows.reserve(2 * keep);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != majority || selected[i]) rows.push_back(i);
    }
    return table.subset(rows);
}

auto split(const AbundanceTable& table, const Labels& labels, const SplitSpec& spec, Rng& rng) -> Split
{
    if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
        throw ConfigError("test_fraction must lie in (0, 1)");
    }
    if (labels.size() != table.rows()) {
        throw DimensionError("split labels have " + std::to_string(labels.size()) + " entries for "
                             + std::to_string(table.rows()) + " row(s)");
    }

    std::vector<std::vector<std::size_t>> groups;
    if (spec.stratified) {
        groups.resize(2);
        for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i] == kCrc ? 1 : 0].push_back(i);
    } else {
        groups.emplace_back(table.rows());
        for (std::size_t i = 0; i < table.rows(); ++i) groups[0][i] = i;
    }

    // round(fraction * N) test rows apportioned to groups by largest
    // remainder, so each group gets floor or ceil of its exact share.
    const auto n_total = static_cast<double>(table.rows());
    const auto n_test_total = static_cast<std::size_t>(std::llround(spec.test_fraction * n_total));
    if (n_test_total < 1 || n_test_total >= table.rows()) {
        throw ConfigError("test_fraction " + std::to_string(spec.test_fraction) + " cannot place rows on both sides ("
                          + std::to_string(table.rows()) + " row(s))");
    }
    std::vector<std::size_t> n_test(groups.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double share = spec.test_fraction * static_cast<double>(groups[g].size());
        n_test[g] = static_cast<std::size_t>(std::floor(share));
        assigned += n_test[g];
        remainders.emplace_back(share - std::floor(share), g);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < n_test_total && k < remainders.size(); ++k) {
        ++n_test[remainders[k].second];
        ++assigned;
    }

    std::vector<char> is_test(table.rows(), 0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        auto& rows = groups[g];
        rng.shuffle(rows);
        for (std::size_t k = 0; k < n_test[g]; ++k) is_test[rows[k]] = 1;
    }

    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < table.rows(); ++i) (is_test[i] ? test_rows : train_rows).push_back(i);
    auto train = table.subset(train_rows);
    auto test = table.subset(test_rows);
    return {std::move(train), std::move(test), std::move(train_rows), std::move(test_rows)};
}

auto split(const AbundanceTable& table, const SplitSpec& spec, Rng& rng) -> Split
{
    if (spec.stratified && !table.has_labels()) throw StateError("stratified split requires labels");
    if (table.has_labels()) return split(table, table.labels(), spec, rng);
    return split(table, Labels(table.rows(), 0), spec, rng);
}

auto synth_planted(const PlantedSpec& spec, const ExprNode& rule, Rng& rng) -> AbundanceTable
{
    if (spec.n_samples == 0 || spec.n_features == 0) throw ConfigError("synthetic table needs samples and features");
    if (!(spec.noise >= 0.0 && spec.noise < 0.5)) throw ConfigError("noise must lie in [0, 0.5)");
    if (auto m = max_feature_index(rule); m && *m >= spec.n_features) {
        throw EvaluationError("rule references X" + std::to_string(*m) + " but table has "
                              + std::to_string(spec.n_features) + " feature(s)");
    }

    const auto n = static_cast<Eigen::Index>(spec.n_samples);
    const auto f = static_cast<Eigen::Index>(spec.n_features);
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, f);
    Labels labels(spec.n_samples, 0);
    std::vector<double> row(spec.n_features);
    for (Eigen::Index i = 0; i < n; ++i) {
        double total = 0.0;
        for (Eigen::Index j = 0; j < f; ++j) {
            double v = 0.0;
            if (!rng.bernoulli(spec.zero_probability)) {
                v = spec.max_value * (1.0 - rng.uniform01());
            }
            values(i, j) = v;
            total += v;
        }
        if (total > 0.0) values.row(i) *= kRowTotal / total;
        for (Eigen::Index j = 0; j < f; ++j) row[static_cast<std::size_t>(j)] = values(i, j);
        int y = eval_row(rule, row) > 0.5 ? 1 : 0;
        if (rng.bernoulli(spec.noise)) y = 1 - y;
        labels[static_cast<std::size_t>(i)] = y;
    }

    std::vector<std::string> features(spec.n_features);
    std::vector<std::string> ids(spec.n_samples);
    char buf[32];
    for (std::size_t j = 0; j < spec.n_features; ++j) {
        features[j] = "taxon_" + std::to_string(j);
    }
    for (std::size_t i = 0; i < spec.n_samples; ++i) {
        std::snprintf(buf, sizeof buf, "S%06zu", i);
        ids[i] = buf;
    }
    return {std::move(features), std::move(ids), std::move(values), std::move(labels), {{"rule", to_sexpr(rule)}}};
}

} // namespace symbio
