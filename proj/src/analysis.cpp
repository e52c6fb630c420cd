#include "symbio/analysis.hpp"

#include "symbio/error.hpp"
#include "symbio/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace symbio {

auto feature_counts(const std::vector<ExprNode>& exprs, const std::vector<std::string>& feature_names, CountMode mode)
    -> FeatureCountRanking
{
    std::map<std::string, std::size_t> counts;
    for (const auto& e : exprs) {
        std::set<std::size_t> seen;
        for_each_node(e, [&](const ExprNode& n) {
            if (n.kind() != ExprNode::Kind::Feature) return;
            const auto idx = n.feature_index();
            if (idx >= feature_names.size()) {
                throw EvaluationError("no feature name for index X" + std::to_string(idx));
            }
            if (mode == CountMode::PerExpression && !seen.insert(idx).second) return;
            ++counts[feature_names[idx]];
        });
    }
    FeatureCountRanking ranking;
    ranking.reserve(counts.size());
    for (auto& [name, count] : counts) ranking.push_back({name, count});
    std::stable_sort(ranking.begin(), ranking.end(),
                     [](const FeatureCount& a, const FeatureCount& b) { return a.count > b.count; });
    return ranking;
}

auto length_stats(const std::vector<ExprNode>& exprs) -> LengthStats
{
    if (exprs.empty()) throw DimensionError("length statistics need at least one expression");
    LengthStats s;
    double total = 0.0;
    for (const auto& e : exprs) {
        s.sizes.push_back(size(e));
        total += static_cast<double>(s.sizes.back());
    }
    const double n = static_cast<double>(exprs.size());
    s.mean = total / n;
    double sq = 0.0;
    for (auto v : s.sizes) sq += (static_cast<double>(v) - s.mean) * (static_cast<double>(v) - s.mean);
    s.stddev = std::sqrt(sq / n);
    return s;
}

auto feature_summary(const AbundanceTable& table, const Labels& labels, const std::vector<std::string>& features)
    -> std::vector<FeatureClassSummary>
{
    if (labels.size() != table.rows()) throw DimensionError("feature summary: label count mismatch");
    std::vector<FeatureClassSummary> out;
    for (const auto& name : features) {
        const auto j = table.feature_index(name);
        if (!j) throw DataError("unknown feature '" + name + "'");
        const auto col = table.values().col(static_cast<Eigen::Index>(*j));
        for (int cls : {kHealthy, kCrc}) {
            FeatureClassSummary s{name, cls};
            double total = 0.0;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                if (labels[i] != cls) continue;
                ++s.n;
                total += col[static_cast<Eigen::Index>(i)];
            }
            if (s.n > 0) {
                s.mean = total / static_cast<double>(s.n);
                double sq = 0.0;
                for (std::size_t i = 0; i < labels.size(); ++i) {
                    if (labels[i] != cls) continue;
                    const double d = col[static_cast<Eigen::Index>(i)] - s.mean;
                    sq += d * d;
                }
                s.stddev = std::sqrt(sq / static_cast<double>(s.n));
            }
            out.push_back(std::move(s));
        }
    }
    return out;
}

auto fidelity(const ExprNode& student, const Labels& teacher_labels, const AbundanceTable& table) -> double
{
    if (teacher_labels.size() != table.rows()) {
        throw DimensionError("fidelity: " + std::to_string(teacher_labels.size()) + " teacher label(s) for "
                             + std::to_string(table.rows()) + " row(s)");
    }
    return metrics(predict_label(student, table), teacher_labels).accuracy;
}

auto fit_with_holdout(const AbundanceTable& table, const Labels& targets, const GPConfig& cfg, const SplitSpec& spec,
                      Rng& rng, const FitObserver& observer) -> HoldoutFit
{
    if (targets.size() != table.rows()) {
        throw DimensionError("holdout fit: " + std::to_string(targets.size()) + " target(s) for "
                             + std::to_string(table.rows()) + " row(s)");
    }
    auto parts = split(table, targets, spec, rng);
    Labels train_y;
    Labels test_y;
    for (auto r : parts.train_rows) train_y.push_back(targets[r]);
    for (auto r : parts.test_rows) test_y.push_back(targets[r]);
    const auto train = parts.train.with_labels(train_y);
    if (observer) observer(train);
    auto evo = evolve(cfg, train, train_y, rng);
    auto pred = predict_label(evo.best.expr, parts.test);
    const double agreement = metrics(pred, test_y).accuracy;
    return {std::move(evo), std::move(parts), std::move(pred), agreement};
}

auto distill(const AbundanceTable& table, const Labels& teacher_labels, const GPConfig& cfg, Rng& rng,
             std::string teacher_source, const FitObserver& observer) -> DistillationResult
{
    auto fit = fit_with_holdout(table, teacher_labels, cfg, SplitSpec{0.25, true}, rng, observer);
    DistillationResult r{std::move(fit.evolution.best), fit.test_agreement, std::move(teacher_source), cfg,
                         std::move(fit.evolution.history), fit.split.train.sample_ids(),
                         fit.split.test.sample_ids()};
    return r;
}

} // namespace symbio
