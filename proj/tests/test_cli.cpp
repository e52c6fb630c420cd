#include "symbio/cli.hpp"
#include "symbio/error.hpp"
#include "symbio/report.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace symbio;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int status;
    std::string out;
    std::string err;
};

auto run_cli(std::vector<std::string> args) -> Result
{
    args.insert(args.begin(), "symbio");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int status = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

auto slurp(const fs::path& p) -> std::string
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

auto report_without_clock(const fs::path& p) -> json
{
    auto j = json::parse(slurp(p));
    j.erase("wall_time_ms");
    return j;
}

auto files_under(const fs::path& dir) -> std::vector<std::string>
{
    std::vector<std::string> out;
    if (!fs::exists(dir)) return out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) out.push_back(fs::relative(e.path(), dir).string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

const std::vector<std::string> kSmallGP{"--set", "population_size=200", "--set", "generations=4", "--set",
                                        "tournament_size=10"};

auto with(std::vector<std::string> a, const std::vector<std::string>& b) -> std::vector<std::string>
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("symbio_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        data_ = (dir_ / "planted.csv").string();
        const auto r = run_cli({"synth", "--samples", "600", "--features", "10", "--rule", "(presence X2)",
                                "--noise", "0", "--seed", "3", "--out", data_});
        ASSERT_EQ(r.status, 0) << r.err;
    }
    void TearDown() override { fs::remove_all(dir_); }

    auto out(const std::string& name) const -> std::string { return (dir_ / name).string(); }

    fs::path dir_;
    std::string data_;
};

} // namespace

TEST_F(Cli, FitWritesArtifactsAndRecoversRule)
{
    const auto r = run_cli({"fit", "--data", data_, "--preset", "srf", "--seed", "1", "--set", "population_size=1000",
                            "--set", "generations=10", "--out-dir", out("fit")});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(files_under(out("fit")), (std::vector<std::string>{"best.dot", "best.sexpr", "report.json"}));
    const auto report = json::parse(slurp(out("fit/report.json")));
    EXPECT_EQ(report["command"], "fit");
    EXPECT_GE(report["metrics"]["srf"]["accuracy"].get<double>(), 0.95);
    EXPECT_EQ(report["config_echo"]["gp"]["population_size"], 1000);
    EXPECT_EQ(report["best_expression"].get<std::string>() + "\n", slurp(out("fit/best.sexpr")));
    EXPECT_TRUE(report.contains("wall_time_ms"));
    EXPECT_EQ(slurp(out("fit/best.dot")).rfind("digraph expr {", 0), 0u);
}

TEST_F(Cli, FitIsReproducibleAndJobIndependent)
{
    const auto base = with({"fit", "--data", data_, "--seed", "9"}, kSmallGP);
    ASSERT_EQ(run_cli(with(base, {"--out-dir", out("a")})).status, 0);
    ASSERT_EQ(run_cli(with(base, {"--out-dir", out("b")})).status, 0);
    ASSERT_EQ(run_cli(with(base, {"--out-dir", out("c"), "--jobs", "4"})).status, 0);
    EXPECT_EQ(report_without_clock(out("a/report.json")), report_without_clock(out("b/report.json")));
    EXPECT_EQ(report_without_clock(out("a/report.json")), report_without_clock(out("c/report.json")));
    EXPECT_EQ(slurp(out("a/best.dot")), slurp(out("c/best.dot")));
}

TEST_F(Cli, ConfigEchoReproducesRun)
{
    ASSERT_EQ(run_cli(with({"fit", "--data", data_, "--seed", "4", "--out-dir", out("a")}, kSmallGP)).status, 0);
    const auto report = json::parse(slurp(out("a/report.json")));
    std::ofstream cfg(out("echo.cfg"));
    for (const auto& [k, v] : report["config_echo"]["gp"].items()) {
        if (k == "seed") continue;
        if (v.is_array()) cfg << k << " = " << v[0].dump() << "," << v[1].dump() << "\n";
        else cfg << k << " = " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
    cfg.close();
    ASSERT_EQ(run_cli({"fit", "--data", data_, "--config", out("echo.cfg"), "--seed", "4", "--out-dir", out("b")}).status, 0);
    EXPECT_EQ(slurp(out("a/best.sexpr")), slurp(out("b/best.sexpr")));
}

TEST_F(Cli, MissingFileIsInputError)
{
    const auto r = run_cli({"fit", "--data", out("nope.csv"), "--out-dir", out("x")});
    EXPECT_EQ(r.status, cli::kExitUsage);
    const auto line = json::parse(r.err);
    EXPECT_NE(line["error"].get<std::string>().find("nope.csv"), std::string::npos);
    EXPECT_EQ(line["kind"], "data");
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
    EXPECT_TRUE(files_under(out("x")).empty());
}

TEST_F(Cli, UsageErrors)
{
    EXPECT_EQ(run_cli({}).status, cli::kExitUsage);
    EXPECT_EQ(run_cli({"fit"}).status, cli::kExitUsage);
    EXPECT_EQ(run_cli({"fit", "--data", data_, "--preset", "xg"}).status, cli::kExitUsage);
    EXPECT_EQ(run_cli({"fit", "--data", data_, "--bogus"}).status, cli::kExitUsage);
    const auto r = run_cli({"fit", "--data", data_, "--set", "populaton_size=3", "--out-dir", out("x")});
    EXPECT_EQ(r.status, cli::kExitUsage);
    EXPECT_EQ(json::parse(r.err)["kind"], "config");
    EXPECT_FALSE(fs::exists(out("x")));
    EXPECT_EQ(run_cli({"--help"}).status, cli::kExitOk);
}

TEST_F(Cli, CommitRemovesPartialOutput)
{
    cli::Artifacts a;
    a.add("first.txt", "ok");
    a.add("blocked", "cannot land on a directory");
    fs::create_directories(out("commit/blocked"));
    EXPECT_THROW(cli::commit(a, out("commit")), DataError);
    EXPECT_FALSE(fs::exists(out("commit/first.txt")));
}

TEST_F(Cli, InputsAreNotModified)
{
    const auto before = slurp(data_);
    ASSERT_EQ(run_cli(with({"fit", "--data", data_, "--out-dir", out("a")}, kSmallGP)).status, 0);
    ASSERT_EQ(run_cli({"teacher", "--data", data_, "--trees", "5", "--out-dir", out("t")}).status, 0);
    EXPECT_EQ(before, slurp(data_));
}

TEST_F(Cli, BenchmarkAggregatesRecomputeExactly)
{
    const auto r = run_cli(with({"benchmark", "--data", data_, "--runs", "3", "--seed", "5", "--out-dir", out("b")}, kSmallGP));
    ASSERT_EQ(r.status, 0) << r.err;
    const auto report = json::parse(slurp(out("b/report.json")));
    ASSERT_EQ(report["runs"].size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(report["runs"][i]["run_seed"], 5u ^ i);
    for (const char* model : {"lr", "dt", "rf", "sr", "srf"}) {
        for (const char* metric : {"accuracy", "f1"}) {
            std::vector<double> v;
            for (const auto& run : report["runs"]) v.push_back(run["models"][model][metric].get<double>());
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            double var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            const auto& agg = report["aggregate"][model][metric];
            EXPECT_EQ(agg["mean"].get<double>(), mean) << model << " " << metric;
            EXPECT_NEAR(agg["stddev"].get<double>(), std::sqrt(var / static_cast<double>(v.size())), 1e-15);
        }
    }
    EXPECT_EQ(cli::aggregate_runs(report["runs"]), report["aggregate"]);
    const auto files = files_under(out("b"));
    EXPECT_NE(std::find(files.begin(), files.end(), "exprs/srf_run_02.sexpr"), files.end());
    EXPECT_NE(std::find(files.begin(), files.end(), "runs.csv"), files.end());
    std::size_t smaller = 0;
    for (const auto& run : report["runs"]) smaller += run["srf_size"].get<std::size_t>() < run["sr_size"].get<std::size_t>();
    EXPECT_EQ(report["srf_smaller_runs"], smaller);
}

TEST_F(Cli, BenchmarkSingleRunHasZeroSpread)
{
    ASSERT_EQ(run_cli(with({"benchmark", "--data", data_, "--runs", "1", "--out-dir", out("b")}, kSmallGP)).status, 0);
    const auto report = json::parse(slurp(out("b/report.json")));
    for (const auto& [model, m] : report["aggregate"].items()) {
        EXPECT_EQ(m["accuracy"]["stddev"], 0.0);
        EXPECT_EQ(m["accuracy"]["mean"], report["runs"][0]["models"][model]["accuracy"]);
    }
}

TEST_F(Cli, DistillOnTruthMatchesFit)
{
    ASSERT_EQ(run_cli({"fit", "--data", data_, "--seed", "2", "--set", "population_size=200", "--set", "generations=3",
                       "--out-dir", out("fit")})
                  .status,
              0);
    std::string teacher = "sample_id,pred\n";
    {
        std::istringstream in(slurp(data_));
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            const auto a = line.find(',');
            const auto b = line.find(',', a + 1);
            teacher += line.substr(0, a) + "," + (line.substr(a + 1, b - a - 1) == "CRC" ? "1" : "0") + "\n";
        }
    }
    std::ofstream(out("truth.csv")) << teacher;
    ASSERT_EQ(run_cli({"distill", "--data", data_, "--teacher", out("truth.csv"), "--seed", "2", "--set",
                       "population_size=200", "--set", "generations=3", "--out-dir", out("dist")})
                  .status,
              0);
    const auto fit = json::parse(slurp(out("fit/report.json")));
    const auto dist = json::parse(slurp(out("dist/report.json")));
    EXPECT_EQ(fit["best_expression"], dist["best_expression"]);
    EXPECT_EQ(fit["metrics"]["srf"], dist["metrics"]["student_vs_truth"]);
    EXPECT_EQ(fit["metrics"]["srf"]["accuracy"], dist["metrics"]["fidelity"]);
    EXPECT_EQ(slurp(out("fit/best.dot")), slurp(out("dist/student.dot")));
}

TEST_F(Cli, DistillJoinIsOrderIndependent)
{
    ASSERT_EQ(run_cli({"teacher", "--data", data_, "--trees", "10", "--seed", "1", "--out-dir", out("t")}).status, 0);
    std::istringstream in(slurp(out("t/teacher.csv")));
    std::string header;
    std::getline(in, header);
    std::vector<std::string> rows;
    for (std::string line; std::getline(in, line);) rows.push_back(line);
    std::mt19937_64 gen(1);
    std::shuffle(rows.begin(), rows.end(), gen);
    std::ofstream shuffled(out("shuffled.csv"));
    shuffled << header << "\n";
    for (const auto& r : rows) shuffled << r << "\n";
    shuffled.close();

    const auto args = with({"distill", "--data", data_, "--seed", "3"}, kSmallGP);
    ASSERT_EQ(run_cli(with(args, {"--teacher", out("t/teacher.csv"), "--out-dir", out("a")})).status, 0);
    ASSERT_EQ(run_cli(with(args, {"--teacher", out("shuffled.csv"), "--out-dir", out("b")})).status, 0);
    auto a = report_without_clock(out("a/report.json"));
    auto b = report_without_clock(out("b/report.json"));
    a["config_echo"].erase("teacher");
    b["config_echo"].erase("teacher");
    EXPECT_EQ(a["best_expression"], b["best_expression"]);
    EXPECT_EQ(a["metrics"], b["metrics"]);
    EXPECT_EQ(slurp(out("a/student.sexpr")), slurp(out("b/student.sexpr")));
    EXPECT_EQ(slurp(out("a/student.dot")), slurp(out("b/student.dot")));
}

TEST_F(Cli, DistillListsUnmatchedIds)
{
    std::ofstream(out("bad.csv")) << "sample_id,pred\nS000000,1\nghost,0\n";
    const auto r = run_cli({"distill", "--data", data_, "--teacher", out("bad.csv"), "--out-dir", out("x")});
    EXPECT_EQ(r.status, cli::kExitUsage);
    const auto msg = json::parse(r.err)["error"].get<std::string>();
    EXPECT_NE(msg.find("ghost"), std::string::npos);
    EXPECT_NE(msg.find("S000001"), std::string::npos);
    EXPECT_FALSE(fs::exists(out("x")));
}

TEST(JoinTeacher, Errors)
{
    Eigen::MatrixXd v(2, 1);
    v << 1, 2;
    const AbundanceTable t({"a"}, {"x", "y"}, v);
    EXPECT_EQ(cli::join_teacher(t, "sample_id,pred\ny,1\nx,0\n", "t"), (Labels{0, 1}));
    EXPECT_THROW((void)cli::join_teacher(t, "id,pred\nx,0\ny,1\n", "t"), DataError);
    EXPECT_THROW((void)cli::join_teacher(t, "sample_id,pred\nx,2\ny,1\n", "t"), DataError);
    EXPECT_THROW((void)cli::join_teacher(t, "sample_id,pred\nx,0\nx,1\ny,1\n", "t"), DataError);
}

TEST_F(Cli, AnalyzeSingleExpression)
{
    std::ofstream(out("one.sexpr")) << "(presence X0)\n";
    const auto r = run_cli({"analyze", "--exprs", out("*.sexpr"), "--top-k", "50", "--out-dir", out("a")});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(slurp(out("a/feature_counts.csv")), "rank,feature,count\n1,X0,1\n");
    ASSERT_EQ(run_cli({"analyze", "--exprs", out("*.sexpr"), "--data", data_, "--top-k", "50", "--out-dir", out("b")}).status, 0);
    EXPECT_EQ(slurp(out("b/feature_counts.csv")), "rank,feature,count\n1,taxon_0,1\n");
    // k beyond distinct features: one feature, two classes, no padding.
    const auto summary = slurp(out("b/feature_summary.csv"));
    EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 3);
}

TEST_F(Cli, AnalyzeConservesBenchmarkCounts)
{
    ASSERT_EQ(run_cli(with({"benchmark", "--data", data_, "--runs", "3", "--out-dir", out("b")}, kSmallGP)).status, 0);
    std::ofstream(out("b/exprs/junk.sexpr")) << "(add X0\n";
    const auto r = run_cli({"analyze", "--exprs", out("b/exprs/*.sexpr"), "--out-dir", out("a")});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto report = json::parse(slurp(out("a/report.json")));
    EXPECT_EQ(report["expressions"], 6);
    EXPECT_EQ(report["warnings"].size(), 1u);
    std::size_t total = 0;
    for (const auto& fc : json::parse(slurp(out("a/feature_counts.json")))) total += fc["count"].get<std::size_t>();
    EXPECT_EQ(report["total_count"], total);
}

TEST_F(Cli, AnalyzeWithoutMatchesFails)
{
    const auto r = run_cli({"analyze", "--exprs", out("none/*.sexpr"), "--out-dir", out("a")});
    EXPECT_EQ(r.status, cli::kExitUsage);
    EXPECT_FALSE(fs::exists(out("a")));
}

TEST_F(Cli, ExportWritesDot)
{
    std::ofstream(out("rule.sexpr")) << "(presence_both X3 X7)\n";
    ASSERT_EQ(run_cli({"export", "--expr", out("rule.sexpr"), "--data", data_, "--out-dir", out("e")}).status, 0);
    const auto dot = slurp(out("e/rule.dot"));
    EXPECT_NE(dot.find("taxon_7"), std::string::npos);
    EXPECT_NE(dot.find("n0 -> n2;"), std::string::npos);
}

TEST_F(Cli, SynthAndTeacherAreDeterministic)
{
    ASSERT_EQ(run_cli({"synth", "--samples", "50", "--seed", "8", "--out", out("a.csv")}).status, 0);
    ASSERT_EQ(run_cli({"synth", "--samples", "50", "--seed", "8", "--out", out("b.csv")}).status, 0);
    EXPECT_EQ(slurp(out("a.csv")), slurp(out("b.csv")));
    ASSERT_EQ(run_cli({"teacher", "--data", data_, "--trees", "8", "--seed", "2", "--out-dir", out("t1")}).status, 0);
    ASSERT_EQ(run_cli({"teacher", "--data", data_, "--trees", "8", "--seed", "2", "--jobs", "4", "--out-dir", out("t4")}).status, 0);
    EXPECT_EQ(slurp(out("t1/teacher.csv")), slurp(out("t4/teacher.csv")));
    EXPECT_EQ(slurp(out("t1/forest.json")), slurp(out("t4/forest.json")));
}
