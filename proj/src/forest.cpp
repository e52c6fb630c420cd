#include "symbio/baselines.hpp"

#include "symbio/error.hpp"
#include "symbio/parallel.hpp"

#include <cmath>
#include <numeric>

namespace symbio {

auto fit_forest(const AbundanceTable& table, const Labels& labels, const ForestConfig& cfg, std::uint64_t seed)
    -> RandomForest
{
    if (cfg.n_trees == 0) throw ConfigError("forest needs at least one tree");
    if (table.rows() == 0) throw FitError("forest needs at least one row");
    const auto n = table.rows();
    const auto m = cfg.max_features == 0
                       ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(table.features()))))
                       : cfg.max_features;

    RandomForest forest;
    forest.trees.resize(cfg.n_trees);
    parallel_for(cfg.n_trees, cfg.n_jobs, [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        std::vector<std::size_t> rows(n);
        if (cfg.bootstrap) {
            for (auto& r : rows) r = static_cast<std::size_t>(rng.index(n));
        } else {
            std::iota(rows.begin(), rows.end(), 0);
        }
        forest.trees[t] = fit_cart_rows(table, labels, std::move(rows), cfg.tree, m, rng);
    });
    return forest;
}

auto RandomForest::votes(const AbundanceTable& table) const -> std::vector<int>
{
    std::vector<int> v(table.rows(), 0);
    for (const auto& t : trees) {
        const auto pred = t.predict(table);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += pred[i];
    }
    return v;
}

auto RandomForest::predict(const AbundanceTable& table) const -> Labels
{
    const auto v = votes(table);
    Labels out(v.size());
    const auto total = static_cast<int>(trees.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = 2 * v[i] > total ? 1 : 0;
    return out;
}

auto to_json(const LogisticModel& m) -> nlohmann::json
{
    auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    return {{"kind", "logreg"},
            {"weights", vec(m.weights)},
            {"bias", m.bias},
            {"mean", vec(m.standardizer.mean)},
            {"scale", vec(m.standardizer.scale)},
            {"iterations", m.iterations}};
}

auto to_json(const DecisionTree& t) -> nlohmann::json
{
    return {{"kind", "cart"},
            {"feature", t.feature},
            {"threshold", t.threshold},
            {"left", t.left},
            {"right", t.right},
            {"value", t.value}};
}

auto to_json(const RandomForest& f) -> nlohmann::json
{
    auto trees = nlohmann::json::array();
    for (const auto& t : f.trees) trees.push_back(to_json(t));
    return {{"kind", "forest"}, {"trees", std::move(trees)}};
}

namespace {

void expect_kind(const nlohmann::json& j, const char* kind)
{
    if (!j.is_object() || j.value("kind", "") != kind) {
        throw DataError(std::string("model document is not of kind '") + kind + "'");
    }
}

auto to_eigen(const std::vector<double>& v) -> Eigen::VectorXd
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

auto logistic_from_json(const nlohmann::json& j) -> LogisticModel
{
    expect_kind(j, "logreg");
    LogisticModel m;
    m.weights = to_eigen(j.at("weights").get<std::vector<double>>());
    m.bias = j.at("bias").get<double>();
    m.standardizer.mean = to_eigen(j.at("mean").get<std::vector<double>>());
    m.standardizer.scale = to_eigen(j.at("scale").get<std::vector<double>>());
    m.iterations = j.value("iterations", std::size_t{0});
    if (m.weights.size() != m.standardizer.mean.size() || m.weights.size() != m.standardizer.scale.size()) {
        throw DataError("logreg document has inconsistent dimensions");
    }
    return m;
}

auto tree_from_json(const nlohmann::json& j) -> DecisionTree
{
    expect_kind(j, "cart");
    DecisionTree t;
    t.feature = j.at("feature").get<std::vector<int>>();
    t.threshold = j.at("threshold").get<std::vector<double>>();
    t.left = j.at("left").get<std::vector<int>>();
    t.right = j.at("right").get<std::vector<int>>();
    t.value = j.at("value").get<std::vector<int>>();
    const auto n = t.feature.size();
    if (n == 0 || t.threshold.size() != n || t.left.size() != n || t.right.size() != n || t.value.size() != n) {
        throw DataError("cart document has inconsistent arrays");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (t.feature[i] >= 0) {
            const auto l = t.left[i];
            const auto r = t.right[i];
            if (l <= static_cast<int>(i) || r <= static_cast<int>(i) || l >= static_cast<int>(n)
                || r >= static_cast<int>(n)) {
                throw DataError("cart document has invalid child index at node " + std::to_string(i));
            }
        }
    }
    return t;
}

auto forest_from_json(const nlohmann::json& j) -> RandomForest
{
    expect_kind(j, "forest");
    RandomForest f;
    for (const auto& t : j.at("trees")) f.trees.push_back(tree_from_json(t));
    if (f.trees.empty()) throw DataError("forest document has no trees");
    return f;
}

} // namespace symbio
