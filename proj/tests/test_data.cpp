#include "support/oracles.hpp"

#include "symbio/data.hpp"
#include "symbio/error.hpp"
#include "symbio/sexpr.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>

using namespace symbio;
using P = Primitive;

namespace {

auto labelled(std::size_t healthy, std::size_t crc, std::size_t features = 2) -> AbundanceTable
{
    const auto n = healthy + crc;
    Eigen::MatrixXd v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(features));
    std::vector<std::string> ids;
    // CRC rows spread evenly through the table so order preservation is visible.
    Labels y(n, 0);
    for (std::size_t k = 0; k < crc; ++k) y[k * n / crc] = 1;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < features; ++j) {
            v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<double>((i + j) % 7);
        }
        ids.push_back("s" + std::to_string(i));
    }
    std::vector<std::string> names;
    for (std::size_t j = 0; j < features; ++j) names.push_back("f" + std::to_string(j));
    return {names, ids, v, y};
}

auto ids_of(const AbundanceTable& t) -> std::set<std::string>
{
    return {t.sample_ids().begin(), t.sample_ids().end()};
}

} // namespace

TEST(Table, RejectsInvalidConstruction)
{
    Eigen::MatrixXd v(2, 2);
    v << 1, 2, 3, 4;
    EXPECT_THROW(AbundanceTable({"a", "a"}, {"s0", "s1"}, v), DataError);
    EXPECT_THROW(AbundanceTable({"a", "b"}, {"s0", "s0"}, v), DataError);
    EXPECT_THROW(AbundanceTable({"a"}, {"s0", "s1"}, v), DimensionError);
    EXPECT_THROW(AbundanceTable({"a", "b"}, {"s0", "s1"}, v, Labels{0, 2}), DataError);
    v(0, 0) = -1;
    EXPECT_THROW(AbundanceTable({"a", "b"}, {"s0", "s1"}, v), DataError);
}

TEST(Table, LoadsLabelledCsv)
{
    const auto t = parse_table("sample_id,label,Fusobacterium,Gemella\nA,healthy,1.5,0\nB,CRC,0,2\n");
    EXPECT_EQ(t.rows(), 2u);
    EXPECT_EQ(t.features(), 2u);
    EXPECT_EQ(t.labels(), (Labels{0, 1}));
    EXPECT_EQ(t.feature_names()[1], "Gemella");
    EXPECT_EQ(t.values()(0, 0), 1.5);
    EXPECT_EQ(t.values()(1, 1), 2.0);
}

TEST(Table, LoadsUnlabelledCsvWithQuotesAndCrlf)
{
    const auto t = parse_table("\xEF\xBB\xBFsample_id,\"a,b\",c\r\nx,1,2\r\n");
    EXPECT_FALSE(t.has_labels());
    EXPECT_EQ(t.feature_names()[0], "a,b");
    EXPECT_THROW((void)t.labels(), StateError);
}

TEST(Table, NegativeValueNamesCell)
{
    try {
        (void)parse_table("sample_id,a,b\nx,1,2\ny,3,-0.1\n");
        FAIL();
    } catch (const DataError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
        EXPECT_NE(msg.find("'y'"), std::string::npos) << msg;
        EXPECT_NE(msg.find("'b'"), std::string::npos) << msg;
        EXPECT_NE(msg.find("-0.1"), std::string::npos) << msg;
    }
}

TEST(Table, LoadErrors)
{
    EXPECT_THROW((void)parse_table(""), DataError);
    EXPECT_THROW((void)parse_table("id,a\nx,1\n"), DataError);
    EXPECT_THROW((void)parse_table("sample_id,a,a\nx,1,2\n"), DataError);
    EXPECT_THROW((void)parse_table("sample_id,a,\nx,1,2\n"), DataError);
    EXPECT_THROW((void)parse_table("sample_id,a,b\nx,1\n"), DataError);
    EXPECT_THROW((void)parse_table("sample_id,label,a\nx,sick,1\n"), DataError);
    EXPECT_THROW((void)parse_table("sample_id,a\nx,abc\n"), DataError);
    EXPECT_THROW((void)parse_table("sample_id,a\nx,1\nx,2\n"), DataError);
    EXPECT_THROW((void)load_table("/nonexistent/table.csv"), DataError);
}

TEST(Table, SaveLoadRoundTrip)
{
    Rng rng(1);
    const auto t = synth_planted({.n_samples = 50, .n_features = 7}, call(P::Presence, X(2)), rng);
    const auto path = std::filesystem::temp_directory_path() / "symbio_roundtrip.csv";
    save_table(t, path);
    const auto back = load_table(path);
    std::filesystem::remove(path);
    EXPECT_EQ(back.feature_names(), t.feature_names());
    EXPECT_EQ(back.sample_ids(), t.sample_ids());
    EXPECT_EQ(back.labels(), t.labels());
    for (Eigen::Index i = 0; i < t.values().rows(); ++i) {
        for (Eigen::Index j = 0; j < t.values().cols(); ++j) {
            const double a = t.values()(i, j);
            ASSERT_LE(std::abs(back.values()(i, j) - a), 1e-12 * std::abs(a));
        }
    }
}

TEST(Normalize, Examples)
{
    Eigen::MatrixXd v(3, 3);
    v << 1, 1, 2, 20, 30, 50, 0, 0, 0;
    const auto n = normalize_rows(AbundanceTable({"a", "b", "c"}, {"r0", "r1", "r2"}, v));
    EXPECT_EQ(n.table.values()(0, 0), 25.0);
    EXPECT_EQ(n.table.values()(0, 1), 25.0);
    EXPECT_EQ(n.table.values()(0, 2), 50.0);
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_NEAR(n.table.values()(1, j), v(1, j), 1e-12);
    EXPECT_EQ(n.table.values().row(2).sum(), 0.0);
    ASSERT_EQ(n.warnings.size(), 1u);
    EXPECT_NE(n.warnings[0].find("r2"), std::string::npos);
}

TEST(Normalize, RowSumsAndIdempotence)
{
    std::mt19937_64 gen(2);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t rows = 20;
        const std::size_t cols = 1 + rep % 13;
        Eigen::MatrixXd v(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        std::vector<std::string> ids;
        std::vector<std::string> names;
        for (std::size_t i = 0; i < rows; ++i) {
            auto r = oracle::random_row(gen, cols);
            r[0] += 1e-3 * static_cast<double>(rep + 1);
            for (std::size_t j = 0; j < cols; ++j) v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[j];
            ids.push_back("s" + std::to_string(i));
        }
        for (std::size_t j = 0; j < cols; ++j) names.push_back("f" + std::to_string(j));
        const auto once = normalize_rows({names, ids, v});
        for (Eigen::Index i = 0; i < once.table.values().rows(); ++i) {
            ASSERT_NEAR(once.table.values().row(i).sum(), 100.0, 1e-6);
        }
        const auto twice = normalize_rows(once.table);
        ASSERT_LE((twice.table.values() - once.table.values()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Undersample, CohortSizes)
{
    const auto t = labelled(10473, 664, 1);
    ASSERT_EQ(class_counts(t.labels()), (std::array<std::size_t, 2>{10473, 664}));
    Rng rng(123);
    const auto b = undersample_balance(t, rng);
    EXPECT_EQ(b.rows(), 1328u);
    EXPECT_EQ(class_counts(b.labels()), (std::array<std::size_t, 2>{664, 664}));
    const auto all = ids_of(t);
    for (const auto& id : b.sample_ids()) ASSERT_TRUE(all.contains(id));
    // Every CRC row survives.
    std::size_t crc_kept = 0;
    for (std::size_t i = 0; i < b.rows(); ++i) crc_kept += b.labels()[i];
    EXPECT_EQ(crc_kept, 664u);
}

TEST(Undersample, PreservesOrderAndIsDeterministic)
{
    const auto t = labelled(40, 9);
    Rng a(5);
    Rng b(5);
    Rng c(6);
    const auto x = undersample_balance(t, a);
    const auto y = undersample_balance(t, b);
    const auto z = undersample_balance(t, c);
    EXPECT_EQ(x.sample_ids(), y.sample_ids());
    EXPECT_NE(x.sample_ids(), z.sample_ids());
    std::vector<std::size_t> positions;
    for (const auto& id : x.sample_ids()) positions.push_back(std::stoul(id.substr(1)));
    EXPECT_TRUE(std::is_sorted(positions.begin(), positions.end()));
}

TEST(Undersample, BalancedIsIdentity)
{
    const auto t = labelled(6, 6);
    Rng rng(1);
    EXPECT_EQ(undersample_balance(t, rng).sample_ids(), t.sample_ids());
}

TEST(Undersample, Errors)
{
    Eigen::MatrixXd v(2, 1);
    v << 1, 2;
    Rng rng(1);
    EXPECT_THROW((void)undersample_balance(AbundanceTable({"a"}, {"x", "y"}, v), rng), StateError);
    EXPECT_THROW((void)undersample_balance(AbundanceTable({"a"}, {"x", "y"}, v, Labels{0, 0}), rng), StateError);
}

TEST(Split, StratifiedCounts)
{
    const auto t = labelled(4, 4);
    Rng rng(3);
    const auto s = split(t, {}, rng);
    EXPECT_EQ(class_counts(s.test.labels()), (std::array<std::size_t, 2>{1, 1}));
    EXPECT_EQ(class_counts(s.train.labels()), (std::array<std::size_t, 2>{3, 3}));
}

TEST(Split, OnePerSide)
{
    const auto t = labelled(1, 1);
    Rng rng(3);
    const auto s = split(t, {.test_fraction = 0.5}, rng);
    EXPECT_EQ(s.train.rows(), 1u);
    EXPECT_EQ(s.test.rows(), 1u);
    EXPECT_NE(s.train.labels()[0], s.test.labels()[0]);
}

TEST(Split, LargestRemainderTieGoesToHealthy)
{
    const auto t = labelled(3, 3);
    Rng rng(3);
    // 1.5 + 1.5 exact shares, 3 test rows in total.
    const auto s = split(t, {.test_fraction = 0.5}, rng);
    EXPECT_EQ(class_counts(s.test.labels()), (std::array<std::size_t, 2>{2, 1}));
}

TEST(Split, Infeasible)
{
    const auto t = labelled(1, 1);
    Rng rng(3);
    EXPECT_THROW((void)split(t, {.test_fraction = 0.2}, rng), ConfigError);
    EXPECT_THROW((void)split(t, {.test_fraction = 0.8}, rng), ConfigError);
    EXPECT_THROW((void)split(t, {.test_fraction = 0.0}, rng), ConfigError);
    EXPECT_THROW((void)split(t, {.test_fraction = 1.0}, rng), ConfigError);
}

TEST(Split, PartitionProperty)
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const std::size_t h = 5 + seed % 40;
        const std::size_t c = 5 + (seed * 7) % 23;
        const auto t = labelled(h, c);
        Rng rng(seed);
        const double frac = 0.1 + 0.05 * static_cast<double>(seed % 12);
        const bool strat = seed % 3 != 0;
        const auto s = split(t, {.test_fraction = frac, .stratified = strat}, rng);
        auto train = ids_of(s.train);
        const auto test = ids_of(s.test);
        ASSERT_EQ(train.size() + test.size(), t.rows());
        for (const auto& id : test) ASSERT_FALSE(train.contains(id));
        train.insert(test.begin(), test.end());
        ASSERT_EQ(train, ids_of(t));
        ASSERT_TRUE(std::is_sorted(s.train_rows.begin(), s.train_rows.end()));
        ASSERT_EQ(s.test.rows(), static_cast<std::size_t>(std::llround(frac * static_cast<double>(h + c))));
        if (strat) {
            const auto counts = class_counts(s.test.labels());
            ASSERT_LT(std::abs(static_cast<double>(counts[0]) - frac * static_cast<double>(h)), 1.0);
            ASSERT_LT(std::abs(static_cast<double>(counts[1]) - frac * static_cast<double>(c)), 1.0);
        }
    }
}

TEST(Split, Deterministic)
{
    const auto t = labelled(30, 20);
    Rng a(9);
    Rng b(9);
    EXPECT_EQ(split(t, {}, a).test_rows, split(t, {}, b).test_rows);
}

TEST(Synth, PresenceRuleNoiseFree)
{
    Rng rng(4);
    const auto t = synth_planted({.n_samples = 500, .n_features = 5}, call(P::Presence, X(0)), rng);
    for (std::size_t i = 0; i < t.rows(); ++i) ASSERT_EQ(t.labels()[i], t.values()(static_cast<Eigen::Index>(i), 0) > 0 ? 1 : 0);
    EXPECT_EQ(t.metadata().at("rule"), "(presence X0)");
}

TEST(Synth, RowsNormalizedAndSparse)
{
    Rng rng(4);
    const auto t = synth_planted({.n_samples = 400, .n_features = 40}, call(P::Presence, X(0)), rng);
    std::size_t zeros = 0;
    for (Eigen::Index i = 0; i < t.values().rows(); ++i) {
        const double s = t.values().row(i).sum();
        ASSERT_TRUE(s == 0.0 || std::abs(s - 100.0) < 1e-6);
        zeros += static_cast<std::size_t>((t.values().row(i).array() == 0.0).count());
    }
    const double rate = static_cast<double>(zeros) / (400.0 * 40.0);
    // Binomial sd over 16000 cells is about 0.0036.
    EXPECT_NEAR(rate, 0.7, 0.015);
}

TEST(Synth, NoiseAgreementBinomial)
{
    Rng rng(21);
    const auto rule = call(P::Presence, X(0));
    const auto t = synth_planted({.n_samples = 10000, .n_features = 3, .noise = 0.1}, rule, rng);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < t.rows(); ++i) agree += (t.values()(static_cast<Eigen::Index>(i), 0) > 0 ? 1 : 0) == t.labels()[i];
    EXPECT_NEAR(static_cast<double>(agree) / 10000.0, 0.9, 0.03);
}

TEST(Synth, PresenceClassBalance)
{
    Rng rng(22);
    const auto t = synth_planted({.n_samples = 10000, .n_features = 3}, call(P::Presence, X(1)), rng);
    const auto counts = class_counts(t.labels());
    // P(cell > 0) = 0.3; sd of the rate is about 0.0046.
    EXPECT_NEAR(static_cast<double>(counts[1]) / 10000.0, 0.3, 0.02);
}

TEST(Synth, InvalidRule)
{
    Rng rng(1);
    EXPECT_THROW((void)synth_planted({.n_samples = 10, .n_features = 3}, call(P::Presence, X(3)), rng), EvaluationError);
}
