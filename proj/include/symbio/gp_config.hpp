#pragma once

#include "symbio/primitive.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace symbio {

struct GPConfig {
    std::size_t population_size = 6000;
    std::size_t generations = 20;
    std::size_t tournament_size = 25;
    std::size_t init_depth_min = 2;
    std::size_t init_depth_max = 6;
    double parsimony_coefficient = 0.001;
    double crossover_prob = 0.9;
    double subtree_mutation_prob = 0.01;
    double hoist_mutation_prob = 0.01;
    double point_mutation_prob = 0.01;
    double point_replace_prob = 0.05;
    double constant_min = -1.0;
    double constant_max = 1.0;
    FunctionSet function_set = FunctionSet::srf();
    std::size_t max_tree_depth = 17;
    std::uint64_t seed = 0;
    // Fitness-evaluation threads; results do not depend on it.
    std::size_t n_jobs = 1;

    // Throws ConfigError listing the first violated constraint.
    void validate() const;
};

// Sets one field from its textual value. Keys are the field names above,
// with `constant_range = lo,hi` as the combined form. Throws ConfigError on
// unknown keys or malformed values.
void set_config_value(GPConfig& cfg, std::string_view key, std::string_view value);

// Flat `key = value` lines; `#` starts a comment.
[[nodiscard]] auto parse_config(std::string_view text, GPConfig base = {}) -> GPConfig;
[[nodiscard]] auto load_config(const std::filesystem::path& path, GPConfig base = {}) -> GPConfig;

// Every field as key -> canonical text; parse_config of the rendered form
// reproduces the config.
[[nodiscard]] auto config_entries(const GPConfig& cfg) -> std::map<std::string, std::string>;
[[nodiscard]] auto format_config(const GPConfig& cfg) -> std::string;

} // namespace symbio
