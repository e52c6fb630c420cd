#include "symbio/baselines.hpp"

#include "symbio/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace symbio {

namespace {

struct SplitChoice {
    bool found = false;
    double impurity = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

// Lower weighted impurity wins; ties go to the lower feature, then threshold.
auto better(const SplitChoice& a, const SplitChoice& b) -> bool
{
    if (!b.found) return a.found;
    if (!a.found) return false;
    if (a.impurity != b.impurity) return a.impurity < b.impurity;
    if (a.feature != b.feature) return a.feature < b.feature;
    return a.threshold < b.threshold;
}

auto gini(double pos, double n) -> double
{
    if (n == 0.0) return 0.0;
    const double p = pos / n;
    return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

class Builder {
public:
    Builder(const AbundanceTable& table, const Labels& labels, const CartConfig& cfg, std::size_t max_features,
            Rng& rng)
        : x_(table.values()), y_(labels), cfg_(cfg), max_features_(max_features), rng_(rng)
    {
    }

    auto build(std::vector<std::size_t> rows) -> DecisionTree
    {
        node(rows, 0);
        return std::move(tree_);
    }

private:
    auto add_leaf(int value) -> int
    {
        tree_.feature.push_back(-1);
        tree_.threshold.push_back(0.0);
        tree_.left.push_back(-1);
        tree_.right.push_back(-1);
        tree_.value.push_back(value);
        return static_cast<int>(tree_.feature.size()) - 1;
    }

    auto is_constant(const std::vector<std::size_t>& rows, Eigen::Index f) const -> bool
    {
        const double first = x_(static_cast<Eigen::Index>(rows.front()), f);
        return std::all_of(rows.begin(), rows.end(),
                           [&](std::size_t r) { return x_(static_cast<Eigen::Index>(r), f) == first; });
    }

    auto scan(const std::vector<std::size_t>& rows, int f, std::size_t positives) const -> SplitChoice
    {
        std::vector<std::pair<double, int>> col;
        col.reserve(rows.size());
        for (auto r : rows) col.emplace_back(x_(static_cast<Eigen::Index>(r), f), y_[r]);
        std::sort(col.begin(), col.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

        const double n = static_cast<double>(rows.size());
        SplitChoice best;
        double left_pos = 0.0;
        for (std::size_t k = 1; k < col.size(); ++k) {
            left_pos += col[k - 1].second;
            if (col[k - 1].first == col[k].first) continue;
            const double nl = static_cast<double>(k);
            const double nr = n - nl;
            const double right_pos = static_cast<double>(positives) - left_pos;
            SplitChoice cand;
            cand.found = true;
            cand.impurity = (nl * gini(left_pos, nl) + nr * gini(right_pos, nr)) / n;
            cand.feature = f;
            cand.threshold = 0.5 * (col[k - 1].first + col[k].first);
            if (!(cand.threshold < col[k].first)) cand.threshold = col[k - 1].first;
            if (better(cand, best)) best = cand;
        }
        return best;
    }

    auto choose(const std::vector<std::size_t>& rows, std::size_t positives) -> SplitChoice
    {
        const auto n_features = static_cast<std::size_t>(x_.cols());
        SplitChoice best;
        if (max_features_ >= n_features) {
            for (std::size_t f = 0; f < n_features; ++f) {
                const auto cand = scan(rows, static_cast<int>(f), positives);
                if (better(cand, best)) best = cand;
            }
            return best;
        }
        // Visit features in random order until max_features non-constant ones were scanned.
        std::vector<std::size_t> order(n_features);
        std::iota(order.begin(), order.end(), 0);
        std::size_t scanned = 0;
        for (std::size_t i = 0; i < n_features && scanned < max_features_; ++i) {
            std::swap(order[i], order[i + static_cast<std::size_t>(rng_.index(n_features - i))]);
            const auto f = order[i];
            if (is_constant(rows, static_cast<Eigen::Index>(f))) continue;
            ++scanned;
            const auto cand = scan(rows, static_cast<int>(f), positives);
            if (better(cand, best)) best = cand;
        }
        return best;
    }

    auto node(const std::vector<std::size_t>& rows, std::size_t level) -> int
    {
        std::size_t positives = 0;
        for (auto r : rows) positives += static_cast<std::size_t>(y_[r]);
        const int majority = 2 * positives > rows.size() ? 1 : 0;
        const bool pure = positives == 0 || positives == rows.size();
        if (pure || (cfg_.max_depth > 0 && level >= cfg_.max_depth) || rows.size() < cfg_.min_samples_split) {
            return add_leaf(majority);
        }
        const auto split = choose(rows, positives);
        if (!split.found) return add_leaf(majority);

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto r : rows) {
            (x_(static_cast<Eigen::Index>(r), split.feature) <= split.threshold ? left : right).push_back(r);
        }
        const int id = add_leaf(majority);
        tree_.feature[static_cast<std::size_t>(id)] = split.feature;
        tree_.threshold[static_cast<std::size_t>(id)] = split.threshold;
        const int l = node(left, level + 1);
        const int r = node(right, level + 1);
        tree_.left[static_cast<std::size_t>(id)] = l;
        tree_.right[static_cast<std::size_t>(id)] = r;
        return id;
    }

    const Eigen::MatrixXd& x_;
    const Labels& y_;
    CartConfig cfg_;
    std::size_t max_features_;
    Rng& rng_;
    DecisionTree tree_;
};

} // namespace

auto DecisionTree::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const -> int
{
    std::size_t at = 0;
    while (feature[at] >= 0) {
        at = static_cast<std::size_t>(x[feature[at]] <= threshold[at] ? left[at] : right[at]);
    }
    return value[at];
}

auto DecisionTree::predict(const AbundanceTable& table) const -> Labels
{
    for (int f : feature) {
        if (f >= static_cast<int>(table.features())) {
            throw DimensionError("tree splits on feature " + std::to_string(f) + " but table has "
                                 + std::to_string(table.features()));
        }
    }
    Labels out(table.rows());
    for (std::size_t i = 0; i < table.rows(); ++i) {
        out[i] = predict_row(table.values().row(static_cast<Eigen::Index>(i)));
    }
    return out;
}

auto DecisionTree::depth() const -> std::size_t
{
    std::vector<std::size_t> level(node_count(), 0);
    std::size_t deepest = 0;
    // Children always follow their parent in the arrays.
    for (std::size_t i = 0; i < node_count(); ++i) {
        deepest = std::max(deepest, level[i]);
        if (feature[i] >= 0) {
            level[static_cast<std::size_t>(left[i])] = level[i] + 1;
            level[static_cast<std::size_t>(right[i])] = level[i] + 1;
        }
    }
    return deepest;
}

auto fit_cart_rows(const AbundanceTable& table, const Labels& labels, std::vector<std::size_t> rows,
                   const CartConfig& cfg, std::size_t max_features, Rng& rng) -> DecisionTree
{
    if (labels.size() != table.rows()) throw DimensionError("decision tree: label count mismatch");
    if (rows.empty() || table.features() == 0) throw FitError("decision tree needs at least one row and feature");
    if (cfg.min_samples_split < 2) throw ConfigError("min_samples_split must be >= 2");
    if (max_features == 0) throw ConfigError("max_features must be >= 1");
    return Builder(table, labels, cfg, max_features, rng).build(std::move(rows));
}

auto fit_cart(const AbundanceTable& table, const Labels& labels, const CartConfig& cfg, std::size_t max_features,
              Rng& rng) -> DecisionTree
{
    std::vector<std::size_t> rows(table.rows());
    std::iota(rows.begin(), rows.end(), 0);
    return fit_cart_rows(table, labels, std::move(rows), cfg, max_features, rng);
}

auto fit_cart(const AbundanceTable& table, const Labels& labels, const CartConfig& cfg) -> DecisionTree
{
    Rng unused(0);
    return fit_cart(table, labels, cfg, std::max<std::size_t>(table.features(), 1), unused);
}

} // namespace symbio
