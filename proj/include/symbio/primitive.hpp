#pragma once

#include <array>
#include <bitset>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace symbio {

enum class Primitive : unsigned char {
    Add,
    Sub,
    Mul,
    Div,
    Log,
    Sqrt,
    Abs,
    Neg,
    Presence,
    Absence,
    PresenceBoth,
    AbsenceBoth,
    IfElse,
    Min,
    Max,
};

inline constexpr std::size_t kPrimitiveCount = 15;

inline constexpr std::array<Primitive, kPrimitiveCount> kAllPrimitives = {
    Primitive::Add, Primitive::Sub, Primitive::Mul, Primitive::Div,
    Primitive::Log, Primitive::Sqrt, Primitive::Abs, Primitive::Neg,
    Primitive::Presence, Primitive::Absence, Primitive::PresenceBoth,
    Primitive::AbsenceBoth, Primitive::IfElse, Primitive::Min, Primitive::Max,
};

[[nodiscard]] auto arity(Primitive p) -> int;
[[nodiscard]] auto name(Primitive p) -> std::string_view;
[[nodiscard]] auto primitive_from_name(std::string_view name) -> std::optional<Primitive>;

// Scalar kernels shared by the row and batch evaluators so both produce
// bit-identical results.
namespace kernel {

inline constexpr double kProtectThreshold = 1e-3;

inline auto protected_div(double a, double b) -> double
{
    return std::abs(b) < kProtectThreshold ? 1.0 : a / b;
}
inline auto protected_log(double x) -> double
{
    return std::abs(x) < kProtectThreshold ? 0.0 : std::log(std::abs(x));
}
inline auto protected_sqrt(double x) -> double { return std::sqrt(std::abs(x)); }
inline auto presence(double x) -> double { return x > 0.0 ? 1.0 : 0.0; }
inline auto absence(double x) -> double { return x > 0.0 ? 0.0 : 1.0; }
inline auto presence_both(double a, double b) -> double { return (a > 0.0 && b > 0.0) ? 1.0 : 0.0; }
inline auto absence_both(double a, double b) -> double { return (a <= 0.0 && b <= 0.0) ? 1.0 : 0.0; }
inline auto ifelse(double a, double b) -> double { return a > b ? a : b; }
inline auto min(double a, double b) -> double { return b < a ? b : a; }
inline auto max(double a, double b) -> double { return a < b ? b : a; }

inline auto unary(Primitive p, double x) -> double
{
    switch (p) {
    case Primitive::Log: return protected_log(x);
    case Primitive::Sqrt: return protected_sqrt(x);
    case Primitive::Abs: return std::abs(x);
    case Primitive::Neg: return -x;
    case Primitive::Presence: return presence(x);
    case Primitive::Absence: return absence(x);
    default: return x;
    }
}

inline auto binary(Primitive p, double a, double b) -> double
{
    switch (p) {
    case Primitive::Add: return a + b;
    case Primitive::Sub: return a - b;
    case Primitive::Mul: return a * b;
    case Primitive::Div: return protected_div(a, b);
    case Primitive::PresenceBoth: return presence_both(a, b);
    case Primitive::AbsenceBoth: return absence_both(a, b);
    case Primitive::IfElse: return ifelse(a, b);
    case Primitive::Min: return min(a, b);
    case Primitive::Max: return max(a, b);
    default: return a;
    }
}

} // namespace kernel

// Checked application: arity must match and all inputs must be finite.
// Throws StructuralError / EvaluationError; the result is always finite.
[[nodiscard]] auto apply_primitive(Primitive p, std::span<const double> args) -> double;

// Set of primitives available to the search.
class FunctionSet {
public:
    FunctionSet() = default;
    FunctionSet(std::initializer_list<Primitive> prims);

    // Arithmetic plus log/sqrt/abs/neg/min/max.
    static auto sr() -> FunctionSet;
    // sr() plus presence/absence/presence_both/absence_both/ifelse.
    static auto srf() -> FunctionSet;
    // "sr", "srf", or a comma-separated primitive list. Throws ConfigError.
    static auto parse(std::string_view text) -> FunctionSet;

    void enable(Primitive p) { bits_.set(static_cast<std::size_t>(p)); }
    [[nodiscard]] auto contains(Primitive p) const -> bool { return bits_.test(static_cast<std::size_t>(p)); }
    [[nodiscard]] auto empty() const -> bool { return bits_.none(); }
    [[nodiscard]] auto size() const -> std::size_t { return bits_.count(); }
    [[nodiscard]] auto primitives() const -> std::vector<Primitive>;
    [[nodiscard]] auto with_arity(int a) const -> std::vector<Primitive>;
    // Strict superset test.
    [[nodiscard]] auto strictly_contains(const FunctionSet& other) const -> bool;
    // Preset name when the set equals a preset, otherwise the primitive list.
    [[nodiscard]] auto to_string() const -> std::string;

    friend auto operator==(const FunctionSet&, const FunctionSet&) -> bool = default;

private:
    std::bitset<kPrimitiveCount> bits_;
};

} // namespace symbio
