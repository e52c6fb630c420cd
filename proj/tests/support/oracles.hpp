#pragma once

// Test-only generators and reference implementations. Nothing here calls the
// library's evaluators so the checks stay independent of them.

#include "symbio/expr.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <vector>

namespace symbio::oracle {

// Random tree over every primitive with depth <= max_depth.
inline auto random_expr(std::mt19937_64& gen, std::size_t n_features, int max_depth, bool odd_constants = false)
    -> ExprNode
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (max_depth == 0 || unit(gen) < 0.3) {
        if (unit(gen) < 0.7) {
            return ExprNode::feature(std::uniform_int_distribution<std::size_t>(0, n_features - 1)(gen));
        }
        if (odd_constants) {
            // Awkward doubles for round-trip checks.
            const double mant = std::uniform_real_distribution<double>(-1.0, 1.0)(gen);
            const int exp = std::uniform_int_distribution<int>(-300, 300)(gen);
            return ExprNode::constant(std::ldexp(mant, exp / 3));
        }
        return ExprNode::constant(std::uniform_real_distribution<double>(-1.0, 1.0)(gen));
    }
    const auto p = kAllPrimitives[std::uniform_int_distribution<std::size_t>(0, kPrimitiveCount - 1)(gen)];
    std::vector<ExprNode> kids;
    for (int i = 0; i < arity(p); ++i) kids.push_back(random_expr(gen, n_features, max_depth - 1, odd_constants));
    return ExprNode::call(p, std::move(kids));
}

// Naive recursive interpreter written straight from the primitive table.
// nullopt when any intermediate is non-finite.
inline auto oracle_eval(const ExprNode& e, const std::vector<double>& row) -> std::optional<double>
{
    if (e.kind() == ExprNode::Kind::Constant) return e.value();
    if (e.kind() == ExprNode::Kind::Feature) return row.at(e.feature_index());
    std::vector<double> a;
    for (const auto& c : e.children()) {
        auto v = oracle_eval(c, row);
        if (!v) return std::nullopt;
        a.push_back(*v);
    }
    double r = 0.0;
    switch (e.primitive()) {
    case Primitive::Add: r = a[0] + a[1]; break;
    case Primitive::Sub: r = a[0] - a[1]; break;
    case Primitive::Mul: r = a[0] * a[1]; break;
    case Primitive::Div: r = std::fabs(a[1]) < 0.001 ? 1.0 : a[0] / a[1]; break;
    case Primitive::Log: r = std::fabs(a[0]) < 0.001 ? 0.0 : std::log(std::fabs(a[0])); break;
    case Primitive::Sqrt: r = std::sqrt(std::fabs(a[0])); break;
    case Primitive::Abs: r = std::fabs(a[0]); break;
    case Primitive::Neg: r = -a[0]; break;
    case Primitive::Presence: r = a[0] > 0 ? 1.0 : 0.0; break;
    case Primitive::Absence: r = a[0] > 0 ? 0.0 : 1.0; break;
    case Primitive::PresenceBoth: r = (a[0] > 0 && a[1] > 0) ? 1.0 : 0.0; break;
    case Primitive::AbsenceBoth: r = (a[0] <= 0 && a[1] <= 0) ? 1.0 : 0.0; break;
    case Primitive::IfElse: r = a[0] > a[1] ? a[0] : a[1]; break;
    case Primitive::Min: r = a[1] < a[0] ? a[1] : a[0]; break;
    case Primitive::Max: r = a[0] < a[1] ? a[1] : a[0]; break;
    }
    if (!std::isfinite(r)) return std::nullopt;
    return r;
}

// Node count by explicit stack walk.
inline auto oracle_size(const ExprNode& e) -> std::size_t
{
    std::size_t n = 0;
    std::vector<const ExprNode*> stack{&e};
    while (!stack.empty()) {
        const auto* cur = stack.back();
        stack.pop_back();
        ++n;
        for (const auto& c : cur->children()) stack.push_back(&c);
    }
    return n;
}

inline auto oracle_feature_nodes(const ExprNode& e) -> std::size_t
{
    std::size_t n = e.kind() == ExprNode::Kind::Feature ? 1 : 0;
    for (const auto& c : e.children()) n += oracle_feature_nodes(c);
    return n;
}

inline auto random_row(std::mt19937_64& gen, std::size_t n) -> std::vector<double>
{
    std::uniform_real_distribution<double> val(0.0, 100.0);
    std::bernoulli_distribution zero(0.5);
    std::vector<double> row(n);
    for (auto& v : row) v = zero(gen) ? 0.0 : val(gen);
    return row;
}

} // namespace symbio::oracle
