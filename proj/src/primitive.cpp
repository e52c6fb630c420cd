#include "symbio/primitive.hpp"

#include "symbio/error.hpp"

#include <cctype>
#include <cmath>

namespace symbio {

namespace {

struct PrimitiveInfo {
    std::string_view name;
    int arity;
};

constexpr std::array<PrimitiveInfo, kPrimitiveCount> kInfo = {{
    {"add", 2},
    {"sub", 2},
    {"mul", 2},
    {"div", 2},
    {"log", 1},
    {"sqrt", 1},
    {"abs", 1},
    {"neg", 1},
    {"presence", 1},
    {"absence", 1},
    {"presence_both", 2},
    {"absence_both", 2},
    {"ifelse", 2},
    {"min", 2},
    {"max", 2},
}};

} // namespace

auto arity(Primitive p) -> int { return kInfo[static_cast<std::size_t>(p)].arity; }

auto name(Primitive p) -> std::string_view { return kInfo[static_cast<std::size_t>(p)].name; }

auto primitive_from_name(std::string_view text) -> std::optional<Primitive>
{
    for (auto p : kAllPrimitives) {
        if (name(p) == text) {
            return p;
        }
    }
    return std::nullopt;
}

auto apply_primitive(Primitive p, std::span<const double> args) -> double
{
    const auto n = static_cast<int>(args.size());
    if (n != arity(p)) {
        throw StructuralError("primitive '" + std::string(name(p)) + "' expects " + std::to_string(arity(p))
                              + " argument(s), got " + std::to_string(n));
    }
    for (double a : args) {
        if (!std::isfinite(a)) {
            throw EvaluationError("non-finite argument to '" + std::string(name(p)) + "'");
        }
    }
    const double r = n == 1 ? kernel::unary(p, args[0]) : kernel::binary(p, args[0], args[1]);
    if (!std::isfinite(r)) {
        throw EvaluationError("'" + std::string(name(p)) + "' overflowed");
    }
    return r;
}

FunctionSet::FunctionSet(std::initializer_list<Primitive> prims)
{
    for (auto p : prims) {
        enable(p);
    }
}

auto FunctionSet::sr() -> FunctionSet
{
    return {Primitive::Add, Primitive::Sub, Primitive::Mul, Primitive::Div, Primitive::Log,
            Primitive::Sqrt, Primitive::Abs, Primitive::Neg, Primitive::Min, Primitive::Max};
}

auto FunctionSet::srf() -> FunctionSet
{
    auto fs = sr();
    for (auto p : {Primitive::Presence, Primitive::Absence, Primitive::PresenceBoth, Primitive::AbsenceBoth,
                   Primitive::IfElse}) {
        fs.enable(p);
    }
    return fs;
}

auto FunctionSet::parse(std::string_view text) -> FunctionSet
{
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    std::string lower(text);
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "sr") return sr();
    if (lower == "srf") return srf();

    FunctionSet fs;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        const auto p = primitive_from_name(item);
        if (!p) {
            throw ConfigError("unknown primitive '" + std::string(item) + "' in function set");
        }
        fs.enable(*p);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    if (fs.empty()) {
        throw ConfigError("function set is empty");
    }
    return fs;
}

auto FunctionSet::primitives() const -> std::vector<Primitive>
{
    std::vector<Primitive> out;
    for (auto p : kAllPrimitives) {
        if (contains(p)) out.push_back(p);
    }
    return out;
}

auto FunctionSet::with_arity(int a) const -> std::vector<Primitive>
{
    std::vector<Primitive> out;
    for (auto p : kAllPrimitives) {
        if (contains(p) && arity(p) == a) out.push_back(p);
    }
    return out;
}

auto FunctionSet::strictly_contains(const FunctionSet& other) const -> bool
{
    return (bits_ & other.bits_) == other.bits_ && bits_ != other.bits_;
}

auto FunctionSet::to_string() const -> std::string
{
    if (*this == sr()) return "sr";
    if (*this == srf()) return "srf";
    std::string out;
    for (auto p : primitives()) {
        if (!out.empty()) out += ',';
        out += name(p);
    }
    return out;
}

} // namespace symbio
