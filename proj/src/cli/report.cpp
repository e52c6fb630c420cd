#include "symbio/report.hpp"

#include "symbio/sexpr.hpp"

#include <cmath>
#include <cstdio>

namespace symbio {

auto to_json(const MetricReport& m) -> nlohmann::json
{
    return {{"accuracy", m.accuracy},
            {"f1", m.f1},
            {"n", m.n},
            {"confusion", {{"tn", m.tn()}, {"fp", m.fp()}, {"fn", m.fn()}, {"tp", m.tp()}}}};
}

auto to_json(const GPConfig& cfg) -> nlohmann::json
{
    return {{"population_size", cfg.population_size},
            {"generations", cfg.generations},
            {"tournament_size", cfg.tournament_size},
            {"init_depth_min", cfg.init_depth_min},
            {"init_depth_max", cfg.init_depth_max},
            {"parsimony_coefficient", cfg.parsimony_coefficient},
            {"crossover_prob", cfg.crossover_prob},
            {"subtree_mutation_prob", cfg.subtree_mutation_prob},
            {"hoist_mutation_prob", cfg.hoist_mutation_prob},
            {"point_mutation_prob", cfg.point_mutation_prob},
            {"point_replace_prob", cfg.point_replace_prob},
            {"constant_range", {cfg.constant_min, cfg.constant_max}},
            {"function_set", cfg.function_set.to_string()},
            {"max_tree_depth", cfg.max_tree_depth},
            {"seed", cfg.seed}};
}

auto to_json(const EvolutionHistory& h) -> nlohmann::json
{
    auto gens = nlohmann::json::array();
    for (const auto& g : h.generations) {
        gens.push_back({{"generation", g.generation},
                        {"best_raw_fitness", g.best_raw_fitness},
                        {"best_penalized_fitness", g.best_penalized_fitness},
                        {"mean_size", g.mean_size},
                        {"best_expression", g.best_expression}});
    }
    return {{"elites", h.elites}, {"generations", std::move(gens)}};
}

auto to_json(const FeatureCountRanking& r) -> nlohmann::json
{
    auto out = nlohmann::json::array();
    for (std::size_t i = 0; i < r.size(); ++i) {
        out.push_back({{"rank", i + 1}, {"feature", r[i].feature}, {"count", r[i].count}});
    }
    return out;
}

auto to_json(const LengthStats& s) -> nlohmann::json
{
    return {{"mean", s.mean}, {"stddev", s.stddev}, {"sizes", s.sizes}};
}

auto to_json(const std::vector<FeatureClassSummary>& s) -> nlohmann::json
{
    auto out = nlohmann::json::array();
    for (const auto& row : s) {
        out.push_back({{"feature", row.feature},
                       {"class", label_name(row.label)},
                       {"n", row.n},
                       {"mean", row.mean},
                       {"stddev", row.stddev}});
    }
    return out;
}

auto to_json(const DistillationResult& d) -> nlohmann::json
{
    return {{"student", to_sexpr(d.student.expr)},
            {"fidelity", d.fidelity},
            {"teacher_source", d.teacher_source},
            {"student_size", d.student.size},
            {"student_depth", d.student.depth},
            {"raw_fitness", d.student.raw_fitness},
            {"penalized_fitness", d.student.penalized_fitness},
            {"holdout_rows", d.holdout_ids.size()},
            {"train_rows", d.train_ids.size()},
            {"config_echo", to_json(d.config_echo)}};
}

namespace {

auto csv_field(const std::string& s) -> std::string
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

auto ranking_csv(const FeatureCountRanking& r) -> std::string
{
    std::string out = "rank,feature,count\n";
    for (std::size_t i = 0; i < r.size(); ++i) {
        out += std::to_string(i + 1) + "," + csv_field(r[i].feature) + "," + std::to_string(r[i].count) + "\n";
    }
    return out;
}

auto summary_csv(const std::vector<FeatureClassSummary>& s) -> std::string
{
    std::string out = "feature,class,mean,stddev\n";
    for (const auto& row : s) {
        out += csv_field(row.feature) + "," + label_name(row.label) + "," + format_shortest(row.mean) + ","
               + format_shortest(row.stddev) + "\n";
    }
    return out;
}

auto mean_std(const std::vector<double>& values) -> MeanStd
{
    if (values.empty()) return {};
    double total = 0.0;
    for (double v : values) total += v;
    const double n = static_cast<double>(values.size());
    const double mean = total / n;
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    return {mean, std::sqrt(sq / n)};
}

} // namespace symbio
