#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace symbio {

// Binary class labels: 0 = healthy, 1 = CRC.
using Labels = std::vector<int>;

inline constexpr int kHealthy = 0;
inline constexpr int kCrc = 1;

// Samples x features matrix of non-negative relative abundances.
//
// Construction validates every invariant (shape agreement, unique names and
// ids, non-negative finite values, labels in {0,1}); a constructed table is
// never modified, derivations return new tables.
class AbundanceTable {
public:
    using Matrix = Eigen::MatrixXd;

    AbundanceTable(std::vector<std::string> feature_names, std::vector<std::string> sample_ids, Matrix values,
                   std::optional<Labels> labels = std::nullopt, std::map<std::string, std::string> metadata = {});

    [[nodiscard]] auto rows() const -> std::size_t { return sample_ids_.size(); }
    [[nodiscard]] auto features() const -> std::size_t { return feature_names_.size(); }
    [[nodiscard]] auto values() const -> const Matrix& { return values_; }
    [[nodiscard]] auto feature_names() const -> const std::vector<std::string>& { return feature_names_; }
    [[nodiscard]] auto sample_ids() const -> const std::vector<std::string>& { return sample_ids_; }
    [[nodiscard]] auto has_labels() const -> bool { return labels_.has_value(); }
    // Throws StateError when unlabeled.
    [[nodiscard]] auto labels() const -> const Labels&;
    [[nodiscard]] auto metadata() const -> const std::map<std::string, std::string>& { return metadata_; }

    [[nodiscard]] auto row(std::size_t i) const -> Eigen::VectorXd { return values_.row(static_cast<Eigen::Index>(i)).transpose(); }
    [[nodiscard]] auto feature_index(const std::string& name) const -> std::optional<std::size_t>;

    // Rows in the given order (indices may repeat only if ids stay unique, so
    // callers pass distinct indices).
    [[nodiscard]] auto subset(std::span<const std::size_t> rows) const -> AbundanceTable;
    [[nodiscard]] auto with_labels(Labels labels) const -> AbundanceTable;
    [[nodiscard]] auto with_metadata(std::string key, std::string value) const -> AbundanceTable;

private:
    std::vector<std::string> feature_names_;
    std::vector<std::string> sample_ids_;
    Matrix values_;
    std::optional<Labels> labels_;
    std::map<std::string, std::string> metadata_;
};

// CSV: header `sample_id[,label],<features...>`; labels `healthy` / `CRC`.
[[nodiscard]] auto load_table(const std::filesystem::path& path) -> AbundanceTable;
[[nodiscard]] auto parse_table(const std::string& text, const std::string& source = "<memory>") -> AbundanceTable;
// Same format; values use the shortest text that parses back exactly.
[[nodiscard]] auto format_table(const AbundanceTable& table) -> std::string;
void save_table(const AbundanceTable& table, const std::filesystem::path& path);

[[nodiscard]] auto label_name(int label) -> const char*;

// Per-class row counts {healthy, CRC}.
[[nodiscard]] auto class_counts(const Labels& labels) -> std::array<std::size_t, 2>;

} // namespace symbio
