#include "symbio/dot.hpp"

#include "symbio/error.hpp"
#include "symbio/sexpr.hpp"

namespace symbio {

namespace {

auto escape(const std::string& s) -> std::string
{
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

auto emit(const ExprNode& e, const std::vector<std::string>& names, std::size_t& next, std::string& nodes,
          std::string& edges) -> std::size_t
{
    const auto id = next++;
    std::string label;
    const char* shape = "ellipse";
    switch (e.kind()) {
    case ExprNode::Kind::Constant:
        label = format_shortest(e.value());
        shape = "plaintext";
        break;
    case ExprNode::Kind::Feature:
        if (e.feature_index() >= names.size()) {
            throw EvaluationError("no feature name for index X" + std::to_string(e.feature_index()));
        }
        label = names[e.feature_index()];
        shape = "box";
        break;
    case ExprNode::Kind::Call:
        label = std::string(name(e.primitive()));
        break;
    }
    nodes += "  n" + std::to_string(id) + " [label=\"" + escape(label) + "\", shape=" + shape + "];\n";
    for (const auto& c : e.children()) {
        const auto child = emit(c, names, next, nodes, edges);
        edges += "  n" + std::to_string(id) + " -> n" + std::to_string(child) + ";\n";
    }
    return id;
}

} // namespace

auto to_dot(const ExprNode& e, const std::vector<std::string>& feature_names) -> std::string
{
    std::string nodes;
    std::string edges;
    std::size_t next = 0;
    emit(e, feature_names, next, nodes, edges);
    return "digraph expr {\n" + nodes + edges + "}\n";
}

} // namespace symbio
