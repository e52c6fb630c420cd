#pragma once

#include "symbio/expr.hpp"

#include <string>
#include <string_view>

namespace symbio {

// Grammar:
//   expr    := constant | feature | "(" name expr+ ")"
//   feature := "X" digits
// Constants print with 17 significant digits so doubles round-trip exactly.
[[nodiscard]] auto to_sexpr(const ExprNode& e) -> std::string;

// Throws ParseError carrying the 1-based token position.
[[nodiscard]] auto parse_sexpr(std::string_view text) -> ExprNode;

// Shortest decimal that round-trips; used for human-facing labels.
[[nodiscard]] auto format_shortest(double v) -> std::string;

} // namespace symbio
