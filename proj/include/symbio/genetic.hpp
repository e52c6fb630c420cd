#pragma once

#include "symbio/expr.hpp"
#include "symbio/gp_config.hpp"
#include "symbio/rng.hpp"
#include "symbio/table.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace symbio {

// Log loss of a fully wrong prediction at the clipping bound; assigned to
// expressions that produce non-finite values.
inline constexpr double kProbabilityClip = 1e-15;
inline const double kWorstLogLoss = -std::log(kProbabilityClip);

struct Individual {
    ExprNode expr;
    double raw_fitness = std::numeric_limits<double>::quiet_NaN();
    double penalized_fitness = std::numeric_limits<double>::quiet_NaN();
    std::size_t size = 0;
    std::size_t depth = 0;
    bool evaluated = false;

    explicit Individual(ExprNode e) : expr(std::move(e)), size(symbio::size(expr)), depth(symbio::depth(expr)) {}
};

struct Fitness {
    double raw;
    double penalized;
};

// Mean log loss of sigmoid(expr) against labels, plus parsimony * size.
[[nodiscard]] auto fitness(const ExprNode& expr, const AbundanceTable& table, const Labels& labels, double parsimony)
    -> Fitness;

// Strict ordering used by selection: lower penalized fitness, then smaller size.
[[nodiscard]] auto fitter(const Individual& a, const Individual& b) -> bool;

enum class GrowMethod { Full, Grow };

// Random tree of at most `max_depth` (exactly max_depth under Full). Leaves
// are features with probability 0.9, otherwise constants in the config range.
[[nodiscard]] auto random_tree(const GPConfig& cfg, std::size_t n_features, std::size_t max_depth, GrowMethod method,
                               Rng& rng) -> ExprNode;
[[nodiscard]] auto random_leaf(const GPConfig& cfg, std::size_t n_features, Rng& rng) -> ExprNode;

// Ramped half-and-half: depth uniform in the init range, full or grow with
// equal probability. Individuals are returned unevaluated.
[[nodiscard]] auto init_population(const GPConfig& cfg, std::size_t n_features, Rng& rng) -> std::vector<Individual>;

// Index of the fittest of k distinct uniformly drawn individuals; ties go to
// the smaller index. Throws StateError on an unevaluated contestant.
[[nodiscard]] auto tournament(const std::vector<Individual>& population, std::size_t k, Rng& rng) -> std::size_t;

// Preorder index of a random node: internal nodes with probability 0.9
// (uniform among them), otherwise a uniform leaf.
[[nodiscard]] auto pick_node(const ExprNode& e, Rng& rng) -> std::size_t;

// Replaces a random subtree of parent with a copy of a random donor subtree.
// Returns parent unchanged when the child would exceed max_depth.
[[nodiscard]] auto crossover(const ExprNode& parent, const ExprNode& donor, std::size_t max_depth, Rng& rng)
    -> ExprNode;
[[nodiscard]] auto subtree_mutation(const ExprNode& expr, const GPConfig& cfg, std::size_t n_features, Rng& rng)
    -> ExprNode;
[[nodiscard]] auto hoist_mutation(const ExprNode& expr, Rng& rng) -> ExprNode;
[[nodiscard]] auto point_mutation(const ExprNode& expr, const GPConfig& cfg, std::size_t n_features, Rng& rng)
    -> ExprNode;

struct GenerationRecord {
    std::size_t generation = 0;
    double best_raw_fitness = 0.0;
    double best_penalized_fitness = 0.0;
    double mean_size = 0.0;
    std::string best_expression;
};

struct EvolutionHistory {
    std::vector<GenerationRecord> generations;
    // One elite is copied into every new generation.
    std::size_t elites = 1;
};

struct EvolutionResult {
    Individual best;
    EvolutionHistory history;
};

// Fills raw/penalized fitness of every unevaluated individual using up to
// `jobs` threads. Results are independent of `jobs`.
void evaluate_population(std::vector<Individual>& population, const AbundanceTable& table, const Labels& labels,
                         double parsimony, std::size_t jobs);

// Generation 0 is the evaluated initial population; each of the
// `cfg.generations` following rounds breeds a new population by tournament
// selection and probabilistic variation, with one elite carried over.
// Returns the best individual ever observed.
[[nodiscard]] auto evolve(const GPConfig& cfg, const AbundanceTable& table, const Labels& labels, Rng& rng)
    -> EvolutionResult;

} // namespace symbio
