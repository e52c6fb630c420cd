#include "symbio/gp_config.hpp"

#include "symbio/error.hpp"
#include "symbio/sexpr.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace symbio {

namespace {

auto trim(std::string_view s) -> std::string_view
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

template <typename T>
auto parse_number(std::string_view key, std::string_view text) -> T
{
    text = trim(text);
    if (!text.empty() && text[0] == '+') text.remove_prefix(1);
    T v{};
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), last, v);
    if (text.empty() || ec != std::errc() || ptr != last) {
        throw ConfigError("config key '" + std::string(key) + "': invalid value '" + std::string(text) + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(v)) {
            throw ConfigError("config key '" + std::string(key) + "': value must be finite");
        }
    }
    return v;
}

} // namespace

void GPConfig::validate() const
{
    auto fail = [](const std::string& msg) { throw ConfigError("invalid GP configuration: " + msg); };
    if (population_size < 2) fail("population_size must be >= 2");
    if (tournament_size < 1 || tournament_size > population_size) {
        fail("tournament_size must lie in [1, population_size]");
    }
    if (init_depth_min > init_depth_max) fail("init_depth_min must be <= init_depth_max");
    if (init_depth_max > max_tree_depth) fail("init_depth_max must be <= max_tree_depth");
    if (parsimony_coefficient < 0.0) fail("parsimony_coefficient must be >= 0");
    for (double p : {crossover_prob, subtree_mutation_prob, hoist_mutation_prob, point_mutation_prob,
                     point_replace_prob}) {
        if (p < 0.0 || p > 1.0) fail("probabilities must lie in [0, 1]");
    }
    if (crossover_prob + subtree_mutation_prob + hoist_mutation_prob + point_mutation_prob > 1.0 + 1e-12) {
        fail("variation probabilities sum above 1");
    }
    if (constant_min > constant_max) fail("constant_range lower bound exceeds upper bound");
    if (function_set.empty()) fail("function_set is empty");
    if (init_depth_max > 0 && function_set.with_arity(1).empty() && function_set.with_arity(2).empty()) {
        fail("function_set has no primitives");
    }
    if (n_jobs < 1) fail("n_jobs must be >= 1");
}

void set_config_value(GPConfig& cfg, std::string_view key, std::string_view value)
{
    key = trim(key);
    value = trim(value);
    using Index = std::size_t;
    if (key == "population_size") cfg.population_size = parse_number<Index>(key, value);
    else if (key == "generations") cfg.generations = parse_number<Index>(key, value);
    else if (key == "tournament_size") cfg.tournament_size = parse_number<Index>(key, value);
    else if (key == "init_depth_min") cfg.init_depth_min = parse_number<Index>(key, value);
    else if (key == "init_depth_max") cfg.init_depth_max = parse_number<Index>(key, value);
    else if (key == "init_depth") {
        const auto comma = value.find(',');
        if (comma == std::string_view::npos) throw ConfigError("config key 'init_depth' expects 'min,max'");
        cfg.init_depth_min = parse_number<Index>(key, value.substr(0, comma));
        cfg.init_depth_max = parse_number<Index>(key, value.substr(comma + 1));
    }
    else if (key == "parsimony_coefficient") cfg.parsimony_coefficient = parse_number<double>(key, value);
    else if (key == "crossover_prob") cfg.crossover_prob = parse_number<double>(key, value);
    else if (key == "subtree_mutation_prob") cfg.subtree_mutation_prob = parse_number<double>(key, value);
    else if (key == "hoist_mutation_prob") cfg.hoist_mutation_prob = parse_number<double>(key, value);
    else if (key == "point_mutation_prob") cfg.point_mutation_prob = parse_number<double>(key, value);
    else if (key == "point_replace_prob") cfg.point_replace_prob = parse_number<double>(key, value);
    else if (key == "constant_range") {
        const auto comma = value.find(',');
        if (comma == std::string_view::npos) throw ConfigError("config key 'constant_range' expects 'lo,hi'");
        cfg.constant_min = parse_number<double>(key, value.substr(0, comma));
        cfg.constant_max = parse_number<double>(key, value.substr(comma + 1));
    }
    else if (key == "function_set") cfg.function_set = FunctionSet::parse(value);
    else if (key == "max_tree_depth") cfg.max_tree_depth = parse_number<Index>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "n_jobs") cfg.n_jobs = parse_number<Index>(key, value);
    else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

auto parse_config(std::string_view text, GPConfig base) -> GPConfig
{
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        set_config_value(base, line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

auto load_config(const std::filesystem::path& path, GPConfig base) -> GPConfig
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

auto config_entries(const GPConfig& cfg) -> std::map<std::string, std::string>
{
    auto num = [](double v) { return format_shortest(v); };
    return {
        {"population_size", std::to_string(cfg.population_size)},
        {"generations", std::to_string(cfg.generations)},
        {"tournament_size", std::to_string(cfg.tournament_size)},
        {"init_depth_min", std::to_string(cfg.init_depth_min)},
        {"init_depth_max", std::to_string(cfg.init_depth_max)},
        {"parsimony_coefficient", num(cfg.parsimony_coefficient)},
        {"crossover_prob", num(cfg.crossover_prob)},
        {"subtree_mutation_prob", num(cfg.subtree_mutation_prob)},
        {"hoist_mutation_prob", num(cfg.hoist_mutation_prob)},
        {"point_mutation_prob", num(cfg.point_mutation_prob)},
        {"point_replace_prob", num(cfg.point_replace_prob)},
        {"constant_range", num(cfg.constant_min) + "," + num(cfg.constant_max)},
        {"function_set", cfg.function_set.to_string()},
        {"max_tree_depth", std::to_string(cfg.max_tree_depth)},
        {"seed", std::to_string(cfg.seed)},
        {"n_jobs", std::to_string(cfg.n_jobs)},
    };
}

auto format_config(const GPConfig& cfg) -> std::string
{
    std::string out;
    for (const auto& [k, v] : config_entries(cfg)) out += k + " = " + v + "\n";
    return out;
}

} // namespace symbio
