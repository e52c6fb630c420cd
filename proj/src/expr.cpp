#include "symbio/expr.hpp"

#include "symbio/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace symbio {

auto ExprNode::constant(double value) -> ExprNode
{
    ExprNode n;
    n.kind_ = Kind::Constant;
    n.value_ = value;
    return n;
}

auto ExprNode::feature(std::size_t index) -> ExprNode
{
    ExprNode n;
    n.kind_ = Kind::Feature;
    n.feature_ = index;
    return n;
}

auto ExprNode::call(Primitive p, std::vector<ExprNode> children) -> ExprNode
{
    if (static_cast<int>(children.size()) != arity(p)) {
        throw StructuralError("primitive '" + std::string(name(p)) + "' expects " + std::to_string(arity(p))
                              + " argument(s), got " + std::to_string(children.size()));
    }
    ExprNode n;
    n.kind_ = Kind::Call;
    n.primitive_ = p;
    n.children_ = std::move(children);
    return n;
}

auto operator==(const ExprNode& a, const ExprNode& b) -> bool
{
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
    case ExprNode::Kind::Constant:
        return std::bit_cast<std::uint64_t>(a.value_) == std::bit_cast<std::uint64_t>(b.value_);
    case ExprNode::Kind::Feature:
        return a.feature_ == b.feature_;
    case ExprNode::Kind::Call:
        return a.primitive_ == b.primitive_ && a.children_ == b.children_;
    }
    return false;
}

auto size(const ExprNode& e) -> std::size_t
{
    std::size_t n = 1;
    for (const auto& c : e.children()) n += size(c);
    return n;
}

auto depth(const ExprNode& e) -> std::size_t
{
    std::size_t d = 0;
    for (const auto& c : e.children()) d = std::max(d, depth(c) + 1);
    return d;
}

auto max_feature_index(const ExprNode& e) -> std::optional<std::size_t>
{
    std::optional<std::size_t> best;
    for_each_node(e, [&](const ExprNode& n) {
        if (n.kind() == ExprNode::Kind::Feature && (!best || n.feature_index() > *best)) {
            best = n.feature_index();
        }
    });
    return best;
}

void for_each_node(const ExprNode& e, const std::function<void(const ExprNode&)>& fn)
{
    fn(e);
    for (const auto& c : e.children()) for_each_node(c, fn);
}

namespace {

auto find_subtree(const ExprNode& e, std::size_t& remaining) -> const ExprNode*
{
    if (remaining == 0) return &e;
    --remaining;
    for (const auto& c : e.children()) {
        if (const auto* hit = find_subtree(c, remaining)) return hit;
    }
    return nullptr;
}

// `offset` is the preorder index of `e` within the whole tree.
auto rebuild(const ExprNode& e, std::size_t offset, std::size_t target, const ExprNode& replacement) -> ExprNode
{
    if (offset == target) return replacement;
    std::vector<ExprNode> kids;
    kids.reserve(e.children().size());
    std::size_t child_offset = offset + 1;
    for (const auto& c : e.children()) {
        const auto n = size(c);
        if (target >= child_offset && target < child_offset + n) {
            kids.push_back(rebuild(c, child_offset, target, replacement));
        } else {
            kids.push_back(c);
        }
        child_offset += n;
    }
    return ExprNode::call(e.primitive(), std::move(kids));
}

void collect_depths(const ExprNode& e, std::size_t d, std::vector<std::size_t>& out)
{
    out.push_back(d);
    for (const auto& c : e.children()) collect_depths(c, d + 1, out);
}

} // namespace

auto subtree_at(const ExprNode& e, std::size_t preorder_index) -> const ExprNode&
{
    std::size_t remaining = preorder_index;
    const auto* hit = find_subtree(e, remaining);
    if (!hit) {
        throw StructuralError("subtree index " + std::to_string(preorder_index) + " out of range");
    }
    return *hit;
}

auto replace_subtree(const ExprNode& e, std::size_t preorder_index, const ExprNode& replacement) -> ExprNode
{
    if (preorder_index >= size(e)) {
        throw StructuralError("subtree index " + std::to_string(preorder_index) + " out of range");
    }
    return rebuild(e, 0, preorder_index, replacement);
}

auto node_depths(const ExprNode& e) -> std::vector<std::size_t>
{
    std::vector<std::size_t> out;
    collect_depths(e, 0, out);
    return out;
}

auto eval_row(const ExprNode& e, std::span<const double> row) -> double
{
    switch (e.kind()) {
    case ExprNode::Kind::Constant:
        return e.value();
    case ExprNode::Kind::Feature:
        if (e.feature_index() >= row.size()) {
            throw EvaluationError("feature index X" + std::to_string(e.feature_index()) + " out of range for "
                                  + std::to_string(row.size()) + " feature(s)");
        }
        return row[e.feature_index()];
    case ExprNode::Kind::Call: {
        std::array<double, 2> args{};
        const auto& kids = e.children();
        for (std::size_t i = 0; i < kids.size(); ++i) args[i] = eval_row(kids[i], row);
        return apply_primitive(e.primitive(), std::span<const double>(args.data(), kids.size()));
    }
    }
    return 0.0;
}

namespace {

// False when some element became non-finite.
auto eval_columns(const ExprNode& e, const AbundanceTable& table, Eigen::ArrayXd& out) -> bool
{
    const auto n = static_cast<Eigen::Index>(table.rows());
    switch (e.kind()) {
    case ExprNode::Kind::Constant:
        out = Eigen::ArrayXd::Constant(n, e.value());
        return true;
    case ExprNode::Kind::Feature:
        if (e.feature_index() >= table.features()) {
            throw EvaluationError("feature index X" + std::to_string(e.feature_index()) + " out of range for "
                                  + std::to_string(table.features()) + " feature(s)");
        }
        out = table.values().col(static_cast<Eigen::Index>(e.feature_index())).array();
        return true;
    case ExprNode::Kind::Call:
        break;
    }

    const auto p = e.primitive();
    const auto& kids = e.children();
    if (!eval_columns(kids[0], table, out)) return false;
    if (kids.size() == 1) {
        out = out.unaryExpr([p](double x) { return kernel::unary(p, x); });
    } else {
        Eigen::ArrayXd rhs;
        if (!eval_columns(kids[1], table, rhs)) return false;
        switch (p) {
        case Primitive::Add: out += rhs; break;
        case Primitive::Sub: out -= rhs; break;
        case Primitive::Mul: out *= rhs; break;
        default: out = out.binaryExpr(rhs, [p](double a, double b) { return kernel::binary(p, a, b); }); break;
        }
    }
    return out.allFinite();
}

} // namespace

auto try_eval_table(const ExprNode& e, const AbundanceTable& table) -> std::optional<Eigen::ArrayXd>
{
    Eigen::ArrayXd out;
    if (!eval_columns(e, table, out)) return std::nullopt;
    return out;
}

auto eval_table(const ExprNode& e, const AbundanceTable& table) -> Eigen::ArrayXd
{
    auto out = try_eval_table(e, table);
    if (!out) {
        throw EvaluationError("expression produced a non-finite value");
    }
    return *std::move(out);
}

auto sigmoid(double z) -> double { return 1.0 / (1.0 + std::exp(-z)); }

auto predict_proba(const ExprNode& e, const AbundanceTable& table) -> Eigen::ArrayXd
{
    return eval_table(e, table).unaryExpr([](double z) { return sigmoid(z); });
}

auto threshold_labels(const Eigen::ArrayXd& proba, double threshold) -> Labels
{
    Labels out(static_cast<std::size_t>(proba.size()));
    for (Eigen::Index i = 0; i < proba.size(); ++i) {
        out[static_cast<std::size_t>(i)] = proba[i] >= threshold ? 1 : 0;
    }
    return out;
}

auto predict_label(const ExprNode& e, const AbundanceTable& table, double threshold) -> Labels
{
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw StructuralError("threshold must lie in (0, 1)");
    }
    return threshold_labels(predict_proba(e, table), threshold);
}

} // namespace symbio
