#include "symbio/cli.hpp"

#include "symbio/analysis.hpp"
#include "symbio/dot.hpp"
#include "symbio/error.hpp"
#include "symbio/report.hpp"
#include "symbio/sexpr.hpp"

#include <glob.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace symbio::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

auto elapsed_ms(Clock::time_point start) -> std::int64_t
{
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

auto read_file(const fs::path& path, const char* what) -> std::string
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(std::string("cannot open ") + what + " '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

auto load_normalized(const fs::path& path) -> Normalized { return normalize_rows(load_table(path)); }

void require_labels(const AbundanceTable& table, const fs::path& path)
{
    if (!table.has_labels()) throw DataError("table '" + path.string() + "' has no label column");
}

auto model_key(const FunctionSet& fs) -> std::string { return fs.to_string(); }

auto sexpr_file(const ExprNode& e) -> std::string { return to_sexpr(e) + "\n"; }

auto run_file_name(const char* prefix, std::size_t i) -> std::string
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "exprs/%s_run_%02zu.sexpr", prefix, i);
    return buf;
}

auto split_json(double test_fraction) -> json { return {{"test_fraction", test_fraction}, {"stratified", true}}; }

auto baselines_json(const BaselineConfig& b) -> json
{
    return {{"logreg",
             {{"max_iterations", b.logreg.max_iterations},
              {"learning_rate", b.logreg.learning_rate},
              {"l2", b.logreg.l2}}},
            {"tree", {{"max_depth", b.tree.max_depth}, {"min_samples_split", b.tree.min_samples_split}}},
            {"forest",
             {{"n_trees", b.forest.n_trees},
              {"bootstrap", b.forest.bootstrap},
              {"max_features", b.forest.max_features == 0 ? json("sqrt") : json(b.forest.max_features)},
              {"max_depth", b.forest.tree.max_depth}}}};
}

// Feature names for rendering: the table's when given, else X<i>.
auto names_for(const std::vector<ExprNode>& exprs, const std::optional<AbundanceTable>& table)
    -> std::vector<std::string>
{
    if (table) return table->feature_names();
    std::size_t n = 0;
    for (const auto& e : exprs) {
        if (auto m = max_feature_index(e)) n = std::max(n, *m + 1);
    }
    std::vector<std::string> names(n);
    for (std::size_t i = 0; i < n; ++i) names[i] = "X" + std::to_string(i);
    return names;
}

auto expand_patterns(const std::vector<std::string>& patterns) -> std::vector<std::string>
{
    std::set<std::string> files;
    for (const auto& p : patterns) {
        glob_t g{};
        const int rc = ::glob(p.c_str(), 0, nullptr, &g);
        if (rc == 0) {
            for (std::size_t i = 0; i < g.gl_pathc; ++i) files.insert(g.gl_pathv[i]);
        }
        ::globfree(&g);
    }
    return {files.begin(), files.end()};
}

} // namespace

auto Artifacts::find(const std::string& name) const -> const std::string*
{
    for (const auto& [n, content] : files) {
        if (n == name) return &content;
    }
    return nullptr;
}

void commit(const Artifacts& artifacts, const fs::path& dir)
{
    std::vector<fs::path> written;
    try {
        for (const auto& [name, content] : artifacts.files) {
            const auto path = dir / name;
            if (path.has_parent_path()) fs::create_directories(path.parent_path());
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out) throw DataError("cannot write output '" + path.string() + "'");
            written.push_back(path);
            out << content;
            out.close();
            if (!out) throw DataError("failed writing output '" + path.string() + "'");
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) fs::remove(p, ec);
        throw;
    }
}

auto resolve_config(const GPOptions& opts) -> GPConfig
{
    GPConfig cfg;
    if (opts.config) cfg = load_config(*opts.config, cfg);
    for (const auto& o : opts.overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not key=value");
        set_config_value(cfg, o.substr(0, eq), o.substr(eq + 1));
    }
    if (opts.preset) cfg.function_set = FunctionSet::parse(*opts.preset);
    cfg.seed = opts.seed;
    cfg.n_jobs = opts.jobs;
    cfg.validate();
    return cfg;
}

auto cmd_fit(const FitOptions& opts) -> Artifacts
{
    const auto start = Clock::now();
    const auto cfg = resolve_config(opts.gp);
    auto [table, warnings] = load_normalized(opts.data);
    require_labels(table, opts.data);

    Rng balance_rng(derive_seed(cfg.seed, stream::balance));
    const auto balanced = undersample_balance(table, balance_rng);
    Rng fit_rng(derive_seed(cfg.seed, stream::fit));
    const auto fit = fit_with_holdout(balanced, balanced.labels(), cfg, SplitSpec{opts.test_fraction, true}, fit_rng);

    const auto& best = fit.evolution.best;
    const auto test_metrics = metrics(fit.test_predictions, fit.split.test.labels());

    json report;
    report["command"] = "fit";
    report["seeds"] = {{"seed", cfg.seed}};
    report["config_echo"] = {{"data", opts.data.string()}, {"gp", to_json(cfg)}, {"split", split_json(opts.test_fraction)}};
    report["rows"] = {{"input", table.rows()},
                      {"balanced", balanced.rows()},
                      {"train", fit.split.train.rows()},
                      {"test", fit.split.test.rows()}};
    report["metrics"] = {{model_key(cfg.function_set), to_json(test_metrics)}};
    report["best_expression"] = to_sexpr(best.expr);
    report["expression_size"] = best.size;
    report["expression_depth"] = best.depth;
    report["train_fitness"] = {{"raw", best.raw_fitness}, {"penalized", best.penalized_fitness}};
    report["history"] = to_json(fit.evolution.history);
    report["warnings"] = warnings;
    report["wall_time_ms"] = elapsed_ms(start);

    Artifacts out;
    out.add_json("report.json", report);
    out.add("best.sexpr", sexpr_file(best.expr));
    out.add("best.dot", to_dot(best.expr, table.feature_names()));
    return out;
}

auto benchmark_run(const AbundanceTable& normalized, const GPConfig& cfg, const BaselineConfig& baselines,
                   std::uint64_t seed, double test_fraction) -> json
{
    Rng balance_rng(derive_seed(seed, stream::balance));
    const auto balanced = undersample_balance(normalized, balance_rng);
    Rng fit_rng(derive_seed(seed, stream::fit));
    const auto parts = split(balanced, SplitSpec{test_fraction, true}, fit_rng);
    const auto& train = parts.train;
    const auto& test = parts.test;
    const auto& train_y = train.labels();
    const auto& test_y = test.labels();

    auto gp_cfg = cfg;
    gp_cfg.seed = seed;
    auto sr_cfg = gp_cfg;
    sr_cfg.function_set = FunctionSet::sr();
    auto srf_cfg = gp_cfg;
    srf_cfg.function_set = FunctionSet::srf();
    // Both presets start from the same stream state.
    Rng sr_rng = fit_rng;
    Rng srf_rng = fit_rng;
    const auto sr = evolve(sr_cfg, train, train_y, sr_rng);
    const auto srf = evolve(srf_cfg, train, train_y, srf_rng);

    const auto lr = fit_logreg(train, train_y, baselines.logreg);
    const auto dt = fit_cart(train, train_y, baselines.tree);
    const auto rf = fit_forest(train, train_y, baselines.forest, derive_seed(seed, stream::baselines));

    json models;
    models["lr"] = to_json(metrics(lr.predict(test), test_y));
    models["dt"] = to_json(metrics(dt.predict(test), test_y));
    models["rf"] = to_json(metrics(rf.predict(test), test_y));
    models["sr"] = to_json(metrics(predict_label(sr.best.expr, test), test_y));
    models["srf"] = to_json(metrics(predict_label(srf.best.expr, test), test_y));

    return {{"run_seed", seed},
            {"rows", {{"balanced", balanced.rows()}, {"train", train.rows()}, {"test", test.rows()}}},
            {"models", std::move(models)},
            {"sr_expression", to_sexpr(sr.best.expr)},
            {"srf_expression", to_sexpr(srf.best.expr)},
            {"sr_size", sr.best.size},
            {"srf_size", srf.best.size},
            {"sr_depth", sr.best.depth},
            {"srf_depth", srf.best.depth}};
}

auto aggregate_runs(const json& runs) -> json
{
    json agg = json::object();
    for (const char* model : {"lr", "dt", "rf", "sr", "srf"}) {
        json entry;
        for (const char* metric : {"accuracy", "f1"}) {
            std::vector<double> values;
            for (const auto& r : runs) values.push_back(r.at("models").at(model).at(metric).get<double>());
            const auto ms = mean_std(values);
            entry[metric] = {{"mean", ms.mean}, {"stddev", ms.stddev}};
        }
        agg[model] = std::move(entry);
    }
    return agg;
}

auto cmd_benchmark(const BenchmarkOptions& opts) -> Artifacts
{
    const auto start = Clock::now();
    const auto cfg = resolve_config(opts.gp);
    if (opts.runs == 0) throw ConfigError("benchmark needs at least one run");
    auto [table, warnings] = load_normalized(opts.data);
    require_labels(table, opts.data);
    auto baselines = opts.baselines;
    baselines.forest.n_jobs = cfg.n_jobs;

    Artifacts out;
    json runs = json::array();
    std::vector<ExprNode> sr_exprs;
    std::vector<ExprNode> srf_exprs;
    std::size_t srf_smaller = 0;
    std::string runs_csv = "run,run_seed,model,accuracy,f1\n";
    for (std::size_t i = 0; i < opts.runs; ++i) {
        const auto seed = run_seed(cfg.seed, i);
        auto record = benchmark_run(table, cfg, baselines, seed, opts.test_fraction);
        record["run"] = i;
        sr_exprs.push_back(parse_sexpr(record["sr_expression"].get<std::string>()));
        srf_exprs.push_back(parse_sexpr(record["srf_expression"].get<std::string>()));
        if (record["srf_size"].get<std::size_t>() < record["sr_size"].get<std::size_t>()) ++srf_smaller;
        for (const char* model : {"lr", "dt", "rf", "sr", "srf"}) {
            const auto& m = record["models"][model];
            runs_csv += std::to_string(i) + "," + std::to_string(seed) + "," + model + ","
                        + format_shortest(m["accuracy"].get<double>()) + "," + format_shortest(m["f1"].get<double>())
                        + "\n";
        }
        out.add(run_file_name("sr", i), sexpr_file(sr_exprs.back()));
        out.add(run_file_name("srf", i), sexpr_file(srf_exprs.back()));
        runs.push_back(std::move(record));
    }

    json run_seeds = json::array();
    for (std::size_t i = 0; i < opts.runs; ++i) run_seeds.push_back(run_seed(cfg.seed, i));

    json report;
    report["command"] = "benchmark";
    report["seeds"] = {{"seed", cfg.seed}, {"run_seeds", run_seeds}, {"rule", "run_seed = seed XOR run_index"}};
    report["config_echo"] = {{"data", opts.data.string()},
                             {"gp", to_json(cfg)},
                             {"runs", opts.runs},
                             {"split", split_json(opts.test_fraction)},
                             {"baselines", baselines_json(baselines)}};
    report["runs"] = runs;
    report["aggregate"] = aggregate_runs(runs);
    report["srf_smaller_runs"] = srf_smaller;
    report["length_stats"] = {{"sr", to_json(length_stats(sr_exprs))}, {"srf", to_json(length_stats(srf_exprs))}};
    report["warnings"] = warnings;
    report["wall_time_ms"] = elapsed_ms(start);

    out.add_json("report.json", report);
    out.add("runs.csv", runs_csv);
    return out;
}

auto join_teacher(const AbundanceTable& table, const std::string& csv, const std::string& source) -> Labels
{
    std::istringstream in(csv);
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, int> preds;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header) {
            if (line != "sample_id,pred") throw DataError(source + ": header must be 'sample_id,pred'");
            header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw DataError(source + ":" + std::to_string(line_no) + ": expected 'sample_id,pred'");
        }
        const auto id = line.substr(0, comma);
        const auto pred = line.substr(comma + 1);
        if (pred != "0" && pred != "1") {
            throw DataError(source + ":" + std::to_string(line_no) + ": pred must be 0 or 1, got '" + pred + "'");
        }
        if (!preds.emplace(id, pred == "1" ? 1 : 0).second) {
            throw DataError(source + ":" + std::to_string(line_no) + ": duplicate sample_id '" + id + "'");
        }
    }
    if (!header) throw DataError(source + ": empty teacher file");

    Labels out;
    out.reserve(table.rows());
    std::vector<std::string> missing;
    std::set<std::string> ids(table.sample_ids().begin(), table.sample_ids().end());
    for (const auto& id : table.sample_ids()) {
        auto it = preds.find(id);
        if (it == preds.end()) {
            missing.push_back(id);
        } else {
            out.push_back(it->second);
        }
    }
    std::vector<std::string> extra;
    for (const auto& [id, p] : preds) {
        if (!ids.contains(id)) extra.push_back(id);
    }
    if (!missing.empty() || !extra.empty()) {
        std::string msg = source + ": unmatched sample_ids;";
        if (!missing.empty()) {
            msg += " missing from teacher file:";
            for (const auto& id : missing) msg += " " + id;
            msg += ";";
        }
        if (!extra.empty()) {
            msg += " not in data:";
            for (const auto& id : extra) msg += " " + id;
        }
        throw DataError(msg);
    }
    return out;
}

auto cmd_distill(const DistillOptions& opts) -> Artifacts
{
    const auto start = Clock::now();
    const auto cfg = resolve_config(opts.gp);
    auto [table, warnings] = load_normalized(opts.data);
    const auto teacher = join_teacher(table, read_file(opts.teacher, "teacher file"), opts.teacher.string());

    std::map<std::string, int> truth;
    if (table.has_labels()) {
        for (std::size_t i = 0; i < table.rows(); ++i) truth[table.sample_ids()[i]] = table.labels()[i];
    }

    auto taught = table.with_labels(teacher);
    const auto counts = class_counts(teacher);
    if (counts[0] > 0 && counts[1] > 0) {
        Rng balance_rng(derive_seed(cfg.seed, stream::balance));
        taught = undersample_balance(taught, balance_rng);
    } else {
        warnings.push_back("teacher predicts a single class; rows were not balanced");
    }

    Rng fit_rng(derive_seed(cfg.seed, stream::fit));
    const auto result = distill(taught, taught.labels(), cfg, fit_rng, opts.teacher.string());

    json metrics_json = {{"fidelity", result.fidelity}};
    if (!truth.empty()) {
        // Student against ground truth on the same held-out rows.
        std::vector<std::size_t> rows;
        Labels truth_y;
        std::map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < taught.rows(); ++i) index[taught.sample_ids()[i]] = i;
        for (const auto& id : result.holdout_ids) {
            rows.push_back(index.at(id));
            truth_y.push_back(truth.at(id));
        }
        const auto holdout = taught.subset(rows);
        metrics_json["student_vs_truth"] = to_json(metrics(predict_label(result.student.expr, holdout), truth_y));
    }

    json report;
    report["command"] = "distill";
    report["seeds"] = {{"seed", cfg.seed}};
    report["config_echo"] = {{"data", opts.data.string()},
                             {"teacher", opts.teacher.string()},
                             {"gp", to_json(cfg)},
                             {"split", split_json(0.25)}};
    report["rows"] = {{"input", table.rows()},
                      {"used", taught.rows()},
                      {"train", result.train_ids.size()},
                      {"holdout", result.holdout_ids.size()}};
    report["metrics"] = metrics_json;
    report["best_expression"] = to_sexpr(result.student.expr);
    report["expression_size"] = result.student.size;
    report["expression_depth"] = result.student.depth;
    report["history"] = to_json(result.history);
    report["warnings"] = warnings;
    report["wall_time_ms"] = elapsed_ms(start);

    Artifacts out;
    out.add_json("report.json", report);
    out.add_json("distill.json", to_json(result));
    out.add("student.sexpr", sexpr_file(result.student.expr));
    out.add("student.dot", to_dot(result.student.expr, table.feature_names()));
    return out;
}

auto cmd_analyze(const AnalyzeOptions& opts) -> Artifacts
{
    const auto files = expand_patterns(opts.patterns);
    std::vector<ExprNode> exprs;
    std::vector<std::string> used;
    std::vector<std::string> warnings;
    for (const auto& f : files) {
        try {
            exprs.push_back(parse_sexpr(read_file(f, "expression file")));
            used.push_back(f);
        } catch (const Error& e) {
            warnings.push_back(f + ": " + e.what());
        }
    }
    if (exprs.empty()) throw DataError("no parseable expressions matched the given pattern(s)");

    std::optional<AbundanceTable> table;
    if (opts.data) {
        auto normalized = load_normalized(*opts.data);
        table = std::move(normalized.table);
        for (auto& w : normalized.warnings) warnings.push_back(std::move(w));
    }
    const auto names = names_for(exprs, table);
    const auto mode = opts.per_expression ? CountMode::PerExpression : CountMode::Occurrences;
    const auto ranking = feature_counts(exprs, names, mode);
    const auto lengths = length_stats(exprs);

    std::size_t total = 0;
    for (const auto& fc : ranking) total += fc.count;

    Artifacts out;
    out.add("feature_counts.csv", ranking_csv(ranking));
    out.add_json("feature_counts.json", to_json(ranking));
    out.add_json("length_stats.json", to_json(lengths));

    json report;
    report["command"] = "analyze";
    report["config_echo"] = {{"patterns", opts.patterns},
                             {"data", opts.data ? json(opts.data->string()) : json(nullptr)},
                             {"top_k", opts.top_k},
                             {"count_mode", opts.per_expression ? "per_expression" : "occurrences"}};
    report["inputs"] = used;
    report["expressions"] = exprs.size();
    report["total_count"] = total;
    report["length_stats"] = to_json(lengths);
    report["top_features"] = to_json(FeatureCountRanking(
        ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(std::min(opts.top_k, ranking.size()))));

    if (table) {
        require_labels(*table, *opts.data);
        std::vector<std::string> top;
        for (std::size_t i = 0; i < ranking.size() && i < opts.top_k; ++i) top.push_back(ranking[i].feature);
        const auto summary = feature_summary(*table, table->labels(), top);
        out.add("feature_summary.csv", summary_csv(summary));
        out.add_json("feature_summary.json", to_json(summary));
    }
    report["warnings"] = warnings;
    out.add_json("report.json", report);
    return out;
}

auto cmd_export(const ExportOptions& opts) -> Artifacts
{
    const auto expr = parse_sexpr(read_file(opts.expr, "expression file"));
    std::optional<AbundanceTable> table;
    if (opts.data) table = load_table(*opts.data);
    Artifacts out;
    out.add(opts.expr.stem().string() + ".dot", to_dot(expr, names_for({expr}, table)));
    return out;
}

auto cmd_synth(const SynthOptions& opts) -> Artifacts
{
    const auto rule = parse_sexpr(opts.rule);
    Rng rng(opts.seed);
    const auto table = synth_planted(opts.spec, rule, rng);
    Artifacts out;
    out.add(opts.file, format_table(table));
    return out;
}

auto cmd_teacher(const TeacherOptions& opts) -> Artifacts
{
    auto [table, warnings] = load_normalized(opts.data);
    require_labels(table, opts.data);
    const auto forest = fit_forest(table, table.labels(), opts.forest, opts.seed);
    const auto pred = forest.predict(table);
    std::string csv = "sample_id,pred\n";
    for (std::size_t i = 0; i < table.rows(); ++i) csv += table.sample_ids()[i] + "," + std::to_string(pred[i]) + "\n";

    json report;
    report["command"] = "teacher";
    report["seeds"] = {{"seed", opts.seed}};
    report["config_echo"] = {{"data", opts.data.string()},
                             {"forest",
                              {{"n_trees", opts.forest.n_trees},
                               {"bootstrap", opts.forest.bootstrap},
                               {"max_features", opts.forest.max_features == 0 ? json("sqrt")
                                                                               : json(opts.forest.max_features)}}}};
    report["metrics"] = {{"rf_train", to_json(metrics(pred, table.labels()))}};
    report["warnings"] = warnings;

    Artifacts out;
    out.add("teacher.csv", csv);
    out.add_json("forest.json", to_json(forest));
    out.add_json("report.json", report);
    return out;
}

} // namespace symbio::cli
