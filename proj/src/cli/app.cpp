#include "symbio/cli.hpp"

#include "symbio/error.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <ostream>

namespace symbio::cli {

namespace {

void add_gp_flags(CLI::App& cmd, GPOptions& gp, bool with_preset)
{
    cmd.add_option("--config", gp.config, "Flat key = value GP configuration file");
    cmd.add_option("--set", gp.overrides, "Override one configuration key (key=value), repeatable");
    if (with_preset) {
        cmd.add_option("--preset", gp.preset, "Function set preset")
            ->check(CLI::IsMember({"sr", "srf"}, CLI::ignore_case));
    }
    cmd.add_option("--seed", gp.seed, "Master seed");
    cmd.add_option("--jobs", gp.jobs, "Evaluation threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
}

void error_line(std::ostream& err, const std::string& kind, const std::string& message)
{
    err << nlohmann::json{{"error", message}, {"kind", kind}}.dump() << "\n";
}

} // namespace

auto run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) -> int
{
    CLI::App app{"Symbolic classification of relative-abundance tables"};
    app.require_subcommand(1);
    std::filesystem::path out_dir = ".";

    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "Evolve one classifier on a balanced train split");
    fit_cmd->add_option("--data", fit.data, "Abundance table CSV")->required();
    add_gp_flags(*fit_cmd, fit.gp, true);
    fit_cmd->add_option("--test-fraction", fit.test_fraction, "Held-out fraction per class");
    fit_cmd->add_option("--out-dir", out_dir, "Output directory");

    BenchmarkOptions bench;
    auto* bench_cmd = app.add_subcommand("benchmark", "Repeated balanced-subsample comparison of all models");
    bench_cmd->add_option("--data", bench.data, "Abundance table CSV")->required();
    add_gp_flags(*bench_cmd, bench.gp, false);
    bench_cmd->add_option("--runs", bench.runs, "Number of subsampling runs");
    bench_cmd->add_option("--test-fraction", bench.test_fraction, "Held-out fraction per class");
    bench_cmd->add_option("--out-dir", out_dir, "Output directory");

    DistillOptions dist;
    auto* dist_cmd = app.add_subcommand("distill", "Fit a symbolic student to teacher predictions");
    dist_cmd->add_option("--data", dist.data, "Abundance table CSV")->required();
    dist_cmd->add_option("--teacher", dist.teacher, "Teacher predictions CSV (sample_id,pred)")->required();
    add_gp_flags(*dist_cmd, dist.gp, true);
    dist_cmd->add_option("--out-dir", out_dir, "Output directory");

    AnalyzeOptions analyze;
    std::filesystem::path analyze_data;
    auto* analyze_cmd = app.add_subcommand("analyze", "Feature counts and length statistics over expressions");
    analyze_cmd->add_option("--exprs", analyze.patterns, "Expression file glob(s)")->required();
    auto* analyze_data_opt = analyze_cmd->add_option("--data", analyze_data, "Table for names and class summaries");
    analyze_cmd->add_option("--top-k", analyze.top_k, "Features summarized per class");
    analyze_cmd->add_flag("--per-expression", analyze.per_expression, "Count each feature once per expression");
    analyze_cmd->add_option("--out-dir", out_dir, "Output directory");

    ExportOptions exp;
    std::filesystem::path export_data;
    auto* export_cmd = app.add_subcommand("export", "Render an expression file as Graphviz DOT");
    export_cmd->add_option("--expr", exp.expr, "Expression file")->required();
    auto* export_data_opt = export_cmd->add_option("--data", export_data, "Table supplying feature names");
    export_cmd->add_option("--out-dir", out_dir, "Output directory");

    SynthOptions synth;
    std::filesystem::path synth_out = "planted.csv";
    auto* synth_cmd = app.add_subcommand("synth", "Generate a planted-rule synthetic table");
    synth_cmd->add_option("--samples", synth.spec.n_samples, "Rows");
    synth_cmd->add_option("--features", synth.spec.n_features, "Features");
    synth_cmd->add_option("--rule", synth.rule, "Generating rule as an S-expression");
    synth_cmd->add_option("--noise", synth.spec.noise, "Label flip probability");
    synth_cmd->add_option("--seed", synth.seed, "Seed");
    synth_cmd->add_option("--out", synth_out, "Output CSV path");

    TeacherOptions teacher;
    auto* teacher_cmd = app.add_subcommand("teacher", "Fit the in-repo random forest and write its predictions");
    teacher_cmd->add_option("--data", teacher.data, "Abundance table CSV")->required();
    teacher_cmd->add_option("--trees", teacher.forest.n_trees, "Number of trees");
    teacher_cmd->add_option("--seed", teacher.seed, "Seed");
    teacher_cmd->add_option("--jobs", teacher.forest.n_jobs, "Tree-fitting threads")->check(CLI::PositiveNumber);
    teacher_cmd->add_option("--out-dir", out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        error_line(err, "usage", e.what());
        return kExitUsage;
    }

    try {
        Artifacts artifacts;
        auto dir = out_dir;
        if (fit_cmd->parsed()) {
            artifacts = cmd_fit(fit);
        } else if (bench_cmd->parsed()) {
            artifacts = cmd_benchmark(bench);
        } else if (dist_cmd->parsed()) {
            artifacts = cmd_distill(dist);
        } else if (analyze_cmd->parsed()) {
            if (analyze_data_opt->count()) analyze.data = analyze_data;
            artifacts = cmd_analyze(analyze);
        } else if (export_cmd->parsed()) {
            if (export_data_opt->count()) exp.data = export_data;
            artifacts = cmd_export(exp);
        } else if (synth_cmd->parsed()) {
            synth.file = synth_out.filename().string();
            dir = synth_out.has_parent_path() ? synth_out.parent_path() : std::filesystem::path(".");
            artifacts = cmd_synth(synth);
        } else if (teacher_cmd->parsed()) {
            artifacts = cmd_teacher(teacher);
        }
        commit(artifacts, dir);
        for (const auto& [name, content] : artifacts.files) out << (dir / name).string() << "\n";
        return kExitOk;
    } catch (const Error& e) {
        error_line(err, e.kind(), e.what());
        return e.input_error() ? kExitUsage : kExitRuntime;
    } catch (const std::exception& e) {
        error_line(err, "runtime", e.what());
        return kExitRuntime;
    }
}

} // namespace symbio::cli
