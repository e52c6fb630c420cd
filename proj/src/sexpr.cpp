#include "symbio/sexpr.hpp"

#include "symbio/error.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <vector>

namespace symbio {

namespace {

void write(const ExprNode& e, std::string& out)
{
    switch (e.kind()) {
    case ExprNode::Kind::Constant: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", e.value());
        out += buf;
        return;
    }
    case ExprNode::Kind::Feature:
        out += 'X';
        out += std::to_string(e.feature_index());
        return;
    case ExprNode::Kind::Call:
        out += '(';
        out += name(e.primitive());
        for (const auto& c : e.children()) {
            out += ' ';
            write(c, out);
        }
        out += ')';
        return;
    }
}

struct Token {
    std::string_view text;
    std::size_t position; // 1-based
};

auto tokenize(std::string_view text) -> std::vector<Token>
{
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
        } else if (c == '(' || c == ')') {
            tokens.push_back({text.substr(i, 1), tokens.size() + 1});
            ++i;
        } else {
            const auto start = i;
            while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '('
                   && text[i] != ')') {
                ++i;
            }
            tokens.push_back({text.substr(start, i - start), tokens.size() + 1});
        }
    }
    return tokens;
}

auto parse_feature(std::string_view atom) -> std::optional<std::size_t>
{
    if (atom.size() < 2 || atom[0] != 'X') return std::nullopt;
    std::size_t idx = 0;
    const auto* first = atom.data() + 1;
    const auto* last = atom.data() + atom.size();
    auto [ptr, ec] = std::from_chars(first, last, idx);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return idx;
}

auto parse_constant(std::string_view atom) -> std::optional<double>
{
    if (!atom.empty() && atom[0] == '+') atom.remove_prefix(1);
    if (atom.empty()) return std::nullopt;
    // Decimal literals only: reject inf/nan/hex spellings accepted by from_chars.
    const auto lead = static_cast<unsigned char>(atom[0] == '-' && atom.size() > 1 ? atom[1] : atom[0]);
    if (!std::isdigit(lead) && lead != '.') return std::nullopt;
    double v = 0.0;
    const auto* last = atom.data() + atom.size();
    auto [ptr, ec] = std::from_chars(atom.data(), last, v, std::chars_format::general);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return v;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    auto parse() -> ExprNode
    {
        auto e = expr();
        if (pos_ < tokens_.size()) {
            fail("end of input", tokens_[pos_]);
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& expected, const Token& tok)
    {
        throw ParseError("token " + std::to_string(tok.position) + ": expected " + expected + ", found '"
                             + std::string(tok.text) + "'",
                         tok.position);
    }

    [[noreturn]] void fail_eof(const std::string& expected)
    {
        const auto position = tokens_.size() + 1;
        throw ParseError("token " + std::to_string(position) + ": expected " + expected + ", found end of input",
                         position);
    }

    auto expr() -> ExprNode
    {
        if (pos_ >= tokens_.size()) fail_eof("expression");
        const auto tok = tokens_[pos_++];
        if (tok.text == "(") return call(tok);
        if (tok.text == ")") fail("expression", tok);
        if (auto f = parse_feature(tok.text)) return ExprNode::feature(*f);
        if (auto c = parse_constant(tok.text)) return ExprNode::constant(*c);
        fail("constant or feature", tok);
    }

    auto call(const Token& open) -> ExprNode
    {
        if (pos_ >= tokens_.size()) fail_eof("primitive name");
        const auto head = tokens_[pos_++];
        if (head.text == "(" || head.text == ")") fail("primitive name", head);
        const auto prim = primitive_from_name(head.text);
        if (!prim) {
            throw ParseError("token " + std::to_string(head.position) + ": unknown primitive '"
                                 + std::string(head.text) + "'",
                             head.position);
        }
        std::vector<ExprNode> args;
        while (true) {
            if (pos_ >= tokens_.size()) fail_eof("expression or ')'");
            if (tokens_[pos_].text == ")") break;
            args.push_back(expr());
        }
        const auto close = tokens_[pos_++];
        if (args.empty()) fail("expression", close);
        if (static_cast<int>(args.size()) != arity(*prim)) {
            throw ParseError("token " + std::to_string(open.position) + ": primitive '" + std::string(head.text)
                                 + "' expects " + std::to_string(arity(*prim)) + " argument(s), got "
                                 + std::to_string(args.size()),
                             open.position);
        }
        return ExprNode::call(*prim, std::move(args));
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

} // namespace

auto to_sexpr(const ExprNode& e) -> std::string
{
    std::string out;
    write(e, out);
    return out;
}

auto parse_sexpr(std::string_view text) -> ExprNode { return Parser(tokenize(text)).parse(); }

auto format_shortest(double v) -> std::string
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace symbio
