#pragma once

#include "symbio/primitive.hpp"
#include "symbio/table.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace symbio {

// Expression tree node: a constant, a feature reference, or a primitive call.
class ExprNode {
public:
    enum class Kind : unsigned char { Constant, Feature, Call };

    static auto constant(double value) -> ExprNode;
    static auto feature(std::size_t index) -> ExprNode;
    // Throws StructuralError when children.size() != arity(p).
    static auto call(Primitive p, std::vector<ExprNode> children) -> ExprNode;

    [[nodiscard]] auto kind() const -> Kind { return kind_; }
    [[nodiscard]] auto is_leaf() const -> bool { return kind_ != Kind::Call; }
    [[nodiscard]] auto value() const -> double { return value_; }
    [[nodiscard]] auto feature_index() const -> std::size_t { return feature_; }
    [[nodiscard]] auto primitive() const -> Primitive { return primitive_; }
    [[nodiscard]] auto children() const -> const std::vector<ExprNode>& { return children_; }

    // Structural equality; constants compare bitwise-equal values.
    friend auto operator==(const ExprNode& a, const ExprNode& b) -> bool;

private:
    ExprNode() = default;

    Kind kind_ = Kind::Constant;
    Primitive primitive_ = Primitive::Add;
    double value_ = 0.0;
    std::size_t feature_ = 0;
    std::vector<ExprNode> children_;
};

// Convenience builders.
inline auto C(double v) -> ExprNode { return ExprNode::constant(v); }
inline auto X(std::size_t i) -> ExprNode { return ExprNode::feature(i); }
inline auto call(Primitive p, ExprNode a) -> ExprNode { return ExprNode::call(p, {std::move(a)}); }
inline auto call(Primitive p, ExprNode a, ExprNode b) -> ExprNode
{
    return ExprNode::call(p, {std::move(a), std::move(b)});
}

// Total node count.
[[nodiscard]] auto size(const ExprNode& e) -> std::size_t;
// Longest root-to-leaf edge count.
[[nodiscard]] auto depth(const ExprNode& e) -> std::size_t;
// Largest feature index referenced, if any.
[[nodiscard]] auto max_feature_index(const ExprNode& e) -> std::optional<std::size_t>;
// Visits every node in preorder.
void for_each_node(const ExprNode& e, const std::function<void(const ExprNode&)>& fn);

// Preorder subtree addressing used by the variation operators.
[[nodiscard]] auto subtree_at(const ExprNode& e, std::size_t preorder_index) -> const ExprNode&;
[[nodiscard]] auto replace_subtree(const ExprNode& e, std::size_t preorder_index, const ExprNode& replacement)
    -> ExprNode;
// Depth of the node at each preorder position.
[[nodiscard]] auto node_depths(const ExprNode& e) -> std::vector<std::size_t>;

// Post-order recursive evaluation on one sample. Throws EvaluationError on an
// out-of-range feature index or a non-finite intermediate.
[[nodiscard]] auto eval_row(const ExprNode& e, std::span<const double> row) -> double;

// Column-wise evaluation over every row of `table`; element i equals
// eval_row(e, row i) bit-for-bit. Throws like eval_row.
[[nodiscard]] auto eval_table(const ExprNode& e, const AbundanceTable& table) -> Eigen::ArrayXd;
// Non-throwing variant: nullopt when any intermediate is non-finite.
// Still throws EvaluationError on an out-of-range feature index.
[[nodiscard]] auto try_eval_table(const ExprNode& e, const AbundanceTable& table) -> std::optional<Eigen::ArrayXd>;

[[nodiscard]] auto sigmoid(double z) -> double;

// sigmoid(eval) per row.
[[nodiscard]] auto predict_proba(const ExprNode& e, const AbundanceTable& table) -> Eigen::ArrayXd;
// 1 iff probability >= threshold.
[[nodiscard]] auto predict_label(const ExprNode& e, const AbundanceTable& table, double threshold = 0.5) -> Labels;
[[nodiscard]] auto threshold_labels(const Eigen::ArrayXd& proba, double threshold = 0.5) -> Labels;

} // namespace symbio
