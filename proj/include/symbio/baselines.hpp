#pragma once

#include "symbio/metrics.hpp"
#include "symbio/rng.hpp"
#include "symbio/table.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace symbio {

struct LogRegConfig {
    std::size_t max_iterations = 500;
    double learning_rate = 0.5;
    double l2 = 1e-3;
    double gradient_tolerance = 1e-6;
};

struct CartConfig {
    // 0 = unlimited.
    std::size_t max_depth = 5;
    std::size_t min_samples_split = 2;
};

struct ForestConfig {
    std::size_t n_trees = 50;
    bool bootstrap = true;
    // Candidate features per split; 0 = ceil(sqrt(F)).
    std::size_t max_features = 0;
    CartConfig tree{0, 2};
    std::size_t n_jobs = 1;
};

struct BaselineConfig {
    LogRegConfig logreg;
    CartConfig tree;
    ForestConfig forest;
};

// Standardization constants; constant features have scale 1 and map to 0.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;

    static auto fit(const Eigen::MatrixXd& x) -> Standardizer;
    [[nodiscard]] auto apply(const Eigen::MatrixXd& x) const -> Eigen::MatrixXd;
};

// Linear model in standardized feature space.
struct LogisticModel {
    Standardizer standardizer;
    Eigen::VectorXd weights;
    double bias = 0.0;
    std::size_t iterations = 0;

    [[nodiscard]] auto decision(const AbundanceTable& table) const -> Eigen::VectorXd;
    [[nodiscard]] auto predict_proba(const AbundanceTable& table) const -> Eigen::VectorXd;
    [[nodiscard]] auto predict(const AbundanceTable& table) const -> Labels;
};

// Mean log loss + l2/2 * |w|^2 on already-standardized inputs, and its gradient.
[[nodiscard]] auto logreg_loss(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double b,
                               double l2) -> double;
struct LogRegGradient {
    Eigen::VectorXd weights;
    double bias;
};
[[nodiscard]] auto logreg_gradient(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                   double b, double l2) -> LogRegGradient;

// Full-batch gradient descent from weights 0 and the prior log-odds bias.
// Throws FitError when labels hold a single class.
[[nodiscard]] auto fit_logreg(const AbundanceTable& table, const Labels& labels, const LogRegConfig& cfg)
    -> LogisticModel;

// Array-encoded binary tree; node 0 is the root. Internal nodes send
// x[feature] <= threshold left.
struct DecisionTree {
    std::vector<int> feature;
    std::vector<double> threshold;
    std::vector<int> left;
    std::vector<int> right;
    std::vector<int> value;

    [[nodiscard]] auto node_count() const -> std::size_t { return feature.size(); }
    [[nodiscard]] auto depth() const -> std::size_t;
    [[nodiscard]] auto predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const -> int;
    [[nodiscard]] auto predict(const AbundanceTable& table) const -> Labels;
};

// Greedy Gini CART over midpoints of sorted unique values. When
// max_features < F each split considers a random feature subset drawn from
// rng; otherwise rng is not used.
[[nodiscard]] auto fit_cart(const AbundanceTable& table, const Labels& labels, const CartConfig& cfg,
                            std::size_t max_features, Rng& rng) -> DecisionTree;
[[nodiscard]] auto fit_cart(const AbundanceTable& table, const Labels& labels, const CartConfig& cfg)
    -> DecisionTree;
// Fits on the given row multiset (repeats allowed).
[[nodiscard]] auto fit_cart_rows(const AbundanceTable& table, const Labels& labels, std::vector<std::size_t> rows,
                                 const CartConfig& cfg, std::size_t max_features, Rng& rng) -> DecisionTree;

struct RandomForest {
    std::vector<DecisionTree> trees;

    // Per-row count of trees voting CRC.
    [[nodiscard]] auto votes(const AbundanceTable& table) const -> std::vector<int>;
    // Majority vote, ties to healthy.
    [[nodiscard]] auto predict(const AbundanceTable& table) const -> Labels;
};

// Tree t draws its bootstrap rows and feature subsets from
// Rng(derive_seed(seed, t)), so fitting order and thread count do not matter.
[[nodiscard]] auto fit_forest(const AbundanceTable& table, const Labels& labels, const ForestConfig& cfg,
                              std::uint64_t seed) -> RandomForest;

// JSON documents tagged by "kind": "logreg", "cart", or "forest".
[[nodiscard]] auto to_json(const LogisticModel& m) -> nlohmann::json;
[[nodiscard]] auto to_json(const DecisionTree& t) -> nlohmann::json;
[[nodiscard]] auto to_json(const RandomForest& f) -> nlohmann::json;
[[nodiscard]] auto logistic_from_json(const nlohmann::json& j) -> LogisticModel;
[[nodiscard]] auto tree_from_json(const nlohmann::json& j) -> DecisionTree;
[[nodiscard]] auto forest_from_json(const nlohmann::json& j) -> RandomForest;

} // namespace symbio
