#pragma once

#include "symbio/expr.hpp"

#include <string>
#include <vector>

namespace symbio {

// Graphviz digraph of the tree. Node ids are preorder indices (n0 is the
// root), edges run parent -> child in argument order, so output is
// byte-stable. Throws EvaluationError when a feature index has no name.
[[nodiscard]] auto to_dot(const ExprNode& e, const std::vector<std::string>& feature_names) -> std::string;

} // namespace symbio
