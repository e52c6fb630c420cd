#pragma once

#include "symbio/baselines.hpp"
#include "symbio/data.hpp"
#include "symbio/gp_config.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace symbio::cli {

// Files produced by a command, written together only after it succeeds.
struct Artifacts {
    std::vector<std::pair<std::string, std::string>> files;

    void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
    void add_json(std::string name, const nlohmann::json& j) { add(std::move(name), j.dump(2) + "\n"); }
    [[nodiscard]] auto find(const std::string& name) const -> const std::string*;
};

// Writes every artifact under dir; on failure removes what was written and
// rethrows.
void commit(const Artifacts& artifacts, const std::filesystem::path& dir);

struct GPOptions {
    std::optional<std::filesystem::path> config;
    std::vector<std::string> overrides; // key=value
    std::optional<std::string> preset;  // sr | srf
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
};

// defaults <- config file <- overrides <- preset / seed / jobs.
[[nodiscard]] auto resolve_config(const GPOptions& opts) -> GPConfig;

// Seed of benchmark run i.
[[nodiscard]] constexpr auto run_seed(std::uint64_t master, std::size_t index) -> std::uint64_t
{
    return master ^ static_cast<std::uint64_t>(index);
}

struct FitOptions {
    std::filesystem::path data;
    GPOptions gp;
    double test_fraction = 0.25;
};
[[nodiscard]] auto cmd_fit(const FitOptions& opts) -> Artifacts;

struct BenchmarkOptions {
    std::filesystem::path data;
    GPOptions gp;
    std::size_t runs = 20;
    double test_fraction = 0.25;
    BaselineConfig baselines;
};
[[nodiscard]] auto cmd_benchmark(const BenchmarkOptions& opts) -> Artifacts;

// One benchmark run on a normalized labeled table; the record it returns is
// what cmd_benchmark stores for run `index`.
[[nodiscard]] auto benchmark_run(const AbundanceTable& normalized, const GPConfig& cfg, const BaselineConfig& baselines,
                                 std::uint64_t seed, double test_fraction) -> nlohmann::json;
// Mean/stddev per model and metric recomputed from per-run records.
[[nodiscard]] auto aggregate_runs(const nlohmann::json& runs) -> nlohmann::json;

struct DistillOptions {
    std::filesystem::path data;
    std::filesystem::path teacher;
    GPOptions gp;
};
[[nodiscard]] auto cmd_distill(const DistillOptions& opts) -> Artifacts;

// `sample_id,pred` rows joined onto table order. Throws DataError listing
// unmatched ids in either direction.
[[nodiscard]] auto join_teacher(const AbundanceTable& table, const std::string& csv, const std::string& source)
    -> Labels;

struct AnalyzeOptions {
    std::vector<std::string> patterns;
    std::optional<std::filesystem::path> data;
    std::size_t top_k = 10;
    bool per_expression = false;
};
[[nodiscard]] auto cmd_analyze(const AnalyzeOptions& opts) -> Artifacts;

struct ExportOptions {
    std::filesystem::path expr;
    std::optional<std::filesystem::path> data;
};
[[nodiscard]] auto cmd_export(const ExportOptions& opts) -> Artifacts;

struct SynthOptions {
    PlantedSpec spec;
    std::string rule = "(presence_both X3 X7)";
    std::uint64_t seed = 0;
    std::string file = "planted.csv";
};
[[nodiscard]] auto cmd_synth(const SynthOptions& opts) -> Artifacts;

struct TeacherOptions {
    std::filesystem::path data;
    ForestConfig forest;
    std::uint64_t seed = 0;
};
[[nodiscard]] auto cmd_teacher(const TeacherOptions& opts) -> Artifacts;

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Full command-line entry point.
[[nodiscard]] auto run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) -> int;

} // namespace symbio::cli
