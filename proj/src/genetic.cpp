#include "symbio/genetic.hpp"

#include "symbio/error.hpp"
#include "symbio/parallel.hpp"
#include "symbio/sexpr.hpp"

#include <algorithm>
#include <cmath>

namespace symbio {

namespace {

constexpr double kInternalNodeBias = 0.9;
constexpr double kFeatureLeafProb = 0.9;

auto log_loss(const Eigen::ArrayXd& logits, const Labels& labels) -> double
{
    double total = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
        const double p = std::clamp(sigmoid(logits[i]), kProbabilityClip, 1.0 - kProbabilityClip);
        total -= labels[static_cast<std::size_t>(i)] == 1 ? std::log(p) : std::log(1.0 - p);
    }
    return total / static_cast<double>(logits.size());
}

auto grow(const GPConfig& cfg, std::size_t n_features, std::size_t level, std::size_t target, GrowMethod method,
          const std::vector<Primitive>& prims, Rng& rng) -> ExprNode
{
    bool internal = false;
    if (level < target) {
        if (method == GrowMethod::Full || level == 0) {
            internal = true;
        } else {
            const auto choice = rng.index(prims.size() + n_features);
            internal = choice < prims.size();
        }
    }
    if (!internal) return random_leaf(cfg, n_features, rng);
    const auto p = prims[rng.index(prims.size())];
    std::vector<ExprNode> kids;
    kids.reserve(static_cast<std::size_t>(arity(p)));
    for (int a = 0; a < arity(p); ++a) kids.push_back(grow(cfg, n_features, level + 1, target, method, prims, rng));
    return ExprNode::call(p, std::move(kids));
}

auto random_method(Rng& rng) -> GrowMethod { return rng.bernoulli(0.5) ? GrowMethod::Full : GrowMethod::Grow; }

auto random_init_tree(const GPConfig& cfg, std::size_t n_features, Rng& rng) -> ExprNode
{
    const auto span = cfg.init_depth_max - cfg.init_depth_min + 1;
    const auto target = cfg.init_depth_min + static_cast<std::size_t>(rng.index(span));
    const auto method = random_method(rng);
    return random_tree(cfg, n_features, target, method, rng);
}

void mutate_points(const ExprNode& e, const GPConfig& cfg, std::size_t n_features, Rng& rng, ExprNode& out)
{
    if (e.is_leaf()) {
        out = rng.bernoulli(cfg.point_replace_prob) ? random_leaf(cfg, n_features, rng) : e;
        return;
    }
    auto p = e.primitive();
    if (rng.bernoulli(cfg.point_replace_prob)) {
        const auto options = cfg.function_set.with_arity(arity(p));
        if (!options.empty()) p = options[rng.index(options.size())];
    }
    std::vector<ExprNode> kids;
    kids.reserve(e.children().size());
    for (const auto& c : e.children()) {
        ExprNode k = c;
        mutate_points(c, cfg, n_features, rng, k);
        kids.push_back(std::move(k));
    }
    out = ExprNode::call(p, std::move(kids));
}

} // namespace

auto fitness(const ExprNode& expr, const AbundanceTable& table, const Labels& labels, double parsimony) -> Fitness
{
    if (labels.size() != table.rows()) {
        throw DimensionError("fitness labels have " + std::to_string(labels.size()) + " entries for "
                             + std::to_string(table.rows()) + " row(s)");
    }
    if (table.rows() == 0) throw DimensionError("fitness on an empty table");
    const auto logits = try_eval_table(expr, table);
    const double raw = logits ? log_loss(*logits, labels) : kWorstLogLoss;
    return {raw, raw + parsimony * static_cast<double>(size(expr))};
}

auto fitter(const Individual& a, const Individual& b) -> bool
{
    if (a.penalized_fitness != b.penalized_fitness) return a.penalized_fitness < b.penalized_fitness;
    return a.size < b.size;
}

auto random_leaf(const GPConfig& cfg, std::size_t n_features, Rng& rng) -> ExprNode
{
    if (rng.bernoulli(kFeatureLeafProb)) return ExprNode::feature(static_cast<std::size_t>(rng.index(n_features)));
    return ExprNode::constant(rng.uniform(cfg.constant_min, cfg.constant_max));
}

auto random_tree(const GPConfig& cfg, std::size_t n_features, std::size_t max_depth, GrowMethod method, Rng& rng)
    -> ExprNode
{
    if (n_features == 0) throw ConfigError("random trees need at least one feature");
    const auto prims = cfg.function_set.primitives();
    if (prims.empty()) throw ConfigError("function set is empty");
    return grow(cfg, n_features, 0, max_depth, method, prims, rng);
}

auto init_population(const GPConfig& cfg, std::size_t n_features, Rng& rng) -> std::vector<Individual>
{
    cfg.validate();
    if (n_features == 0) throw ConfigError("population needs at least one feature");
    std::vector<Individual> pop;
    pop.reserve(cfg.population_size);
    for (std::size_t i = 0; i < cfg.population_size; ++i) pop.emplace_back(random_init_tree(cfg, n_features, rng));
    return pop;
}

auto tournament(const std::vector<Individual>& population, std::size_t k, Rng& rng) -> std::size_t
{
    const auto n = population.size();
    if (k < 1 || k > n) throw ConfigError("tournament size must lie in [1, population size]");

    // Floyd's sampling; the winner does not depend on draw order.
    std::vector<std::size_t> picked;
    picked.reserve(k);
    auto has = [&](std::size_t v) { return std::find(picked.begin(), picked.end(), v) != picked.end(); };
    if (2 * k > n) {
        picked = rng.sample_without_replacement(n, k);
    } else {
        for (std::size_t j = n - k; j < n; ++j) {
            const auto t = static_cast<std::size_t>(rng.index(j + 1));
            picked.push_back(has(t) ? j : t);
        }
    }

    std::size_t best = picked.front();
    for (auto i : picked) {
        if (!population[i].evaluated) throw StateError("tournament over unevaluated individual " + std::to_string(i));
        const auto& cand = population[i];
        const auto& cur = population[best];
        if (fitter(cand, cur) || (!fitter(cur, cand) && i < best)) best = i;
    }
    return best;
}

auto pick_node(const ExprNode& e, Rng& rng) -> std::size_t
{
    std::vector<std::size_t> internal;
    std::vector<std::size_t> leaves;
    std::size_t idx = 0;
    for_each_node(e, [&](const ExprNode& n) { (n.is_leaf() ? leaves : internal).push_back(idx++); });
    if (!internal.empty() && rng.bernoulli(kInternalNodeBias)) return internal[rng.index(internal.size())];
    return leaves[rng.index(leaves.size())];
}

auto crossover(const ExprNode& parent, const ExprNode& donor, std::size_t max_depth, Rng& rng) -> ExprNode
{
    const auto at = pick_node(parent, rng);
    const auto from = pick_node(donor, rng);
    auto child = replace_subtree(parent, at, subtree_at(donor, from));
    if (depth(child) > max_depth) return parent;
    return child;
}

auto subtree_mutation(const ExprNode& expr, const GPConfig& cfg, std::size_t n_features, Rng& rng) -> ExprNode
{
    const auto donor = random_init_tree(cfg, n_features, rng);
    return crossover(expr, donor, cfg.max_tree_depth, rng);
}

auto hoist_mutation(const ExprNode& expr, Rng& rng) -> ExprNode
{
    const auto at = pick_node(expr, rng);
    const auto& sub = subtree_at(expr, at);
    const auto inner = pick_node(sub, rng);
    if (inner == 0) return expr;
    return replace_subtree(expr, at, subtree_at(sub, inner));
}

auto point_mutation(const ExprNode& expr, const GPConfig& cfg, std::size_t n_features, Rng& rng) -> ExprNode
{
    ExprNode out = expr;
    mutate_points(expr, cfg, n_features, rng, out);
    return out;
}

void evaluate_population(std::vector<Individual>& population, const AbundanceTable& table, const Labels& labels,
                         double parsimony, std::size_t jobs)
{
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < population.size(); ++i) {
        if (!population[i].evaluated) pending.push_back(i);
    }
    parallel_for(pending.size(), jobs, [&](std::size_t k) {
        auto& ind = population[pending[k]];
        const auto f = fitness(ind.expr, table, labels, parsimony);
        ind.raw_fitness = f.raw;
        ind.penalized_fitness = f.penalized;
        ind.evaluated = true;
    });
}

namespace {

auto best_index(const std::vector<Individual>& pop) -> std::size_t
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop.size(); ++i) {
        if (fitter(pop[i], pop[best])) best = i;
    }
    return best;
}

auto record(std::size_t generation, const std::vector<Individual>& pop, std::size_t best) -> GenerationRecord
{
    double total = 0.0;
    for (const auto& ind : pop) total += static_cast<double>(ind.size);
    return {generation, pop[best].raw_fitness, pop[best].penalized_fitness, total / static_cast<double>(pop.size()),
            to_sexpr(pop[best].expr)};
}

} // namespace

auto evolve(const GPConfig& cfg, const AbundanceTable& table, const Labels& labels, Rng& rng) -> EvolutionResult
{
    cfg.validate();
    if (table.rows() == 0) throw DimensionError("cannot evolve on an empty table");
    if (labels.size() != table.rows()) {
        throw DimensionError("evolve labels have " + std::to_string(labels.size()) + " entries for "
                             + std::to_string(table.rows()) + " row(s)");
    }
    const auto n_features = table.features();
    const double cx = cfg.crossover_prob;
    const double sub = cx + cfg.subtree_mutation_prob;
    const double hoist = sub + cfg.hoist_mutation_prob;
    const double point = hoist + cfg.point_mutation_prob;

    auto pop = init_population(cfg, n_features, rng);
    evaluate_population(pop, table, labels, cfg.parsimony_coefficient, cfg.n_jobs);

    auto current_best = best_index(pop);
    Individual best = pop[current_best];
    EvolutionHistory history;
    history.generations.push_back(record(0, pop, current_best));

    for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
        std::vector<Individual> next;
        next.reserve(pop.size());
        next.push_back(pop[current_best]);
        while (next.size() < pop.size()) {
            const double r = rng.uniform01();
            const auto& parent = pop[tournament(pop, cfg.tournament_size, rng)];
            if (r < cx) {
                const auto& donor = pop[tournament(pop, cfg.tournament_size, rng)];
                next.emplace_back(crossover(parent.expr, donor.expr, cfg.max_tree_depth, rng));
            } else if (r < sub) {
                next.emplace_back(subtree_mutation(parent.expr, cfg, n_features, rng));
            } else if (r < hoist) {
                next.emplace_back(hoist_mutation(parent.expr, rng));
            } else if (r < point) {
                next.emplace_back(point_mutation(parent.expr, cfg, n_features, rng));
            } else {
                next.push_back(parent);
            }
        }
        pop = std::move(next);
        evaluate_population(pop, table, labels, cfg.parsimony_coefficient, cfg.n_jobs);
        current_best = best_index(pop);
        if (fitter(pop[current_best], best)) best = pop[current_best];
        history.generations.push_back(record(gen, pop, current_best));
    }
    return {std::move(best), std::move(history)};
}

} // namespace symbio
