#include "symbio/table.hpp"

#include "symbio/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace symbio {

namespace {

void require_unique(const std::vector<std::string>& items, const char* what)
{
    std::unordered_set<std::string> seen;
    for (const auto& s : items) {
        if (s.empty()) {
            throw DataError(std::string("empty ") + what);
        }
        if (!seen.insert(s).second) {
            throw DataError(std::string("duplicate ") + what + " '" + s + "'");
        }
    }
}

// Splits one CSV record; supports double-quoted fields.
auto split_record(const std::string& line, std::size_t line_no, const std::string& source) -> std::vector<std::string>
{
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) {
        throw DataError(source + ":" + std::to_string(line_no) + ": unterminated quoted field");
    }
    fields.push_back(std::move(cur));
    return fields;
}

auto quote_if_needed(const std::string& s) -> std::string
{
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

auto trim(std::string_view s) -> std::string_view
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

} // namespace

AbundanceTable::AbundanceTable(std::vector<std::string> feature_names, std::vector<std::string> sample_ids,
                               Matrix values, std::optional<Labels> labels,
                               std::map<std::string, std::string> metadata)
    : feature_names_(std::move(feature_names))
    , sample_ids_(std::move(sample_ids))
    , values_(std::move(values))
    , labels_(std::move(labels))
    , metadata_(std::move(metadata))
{
    if (static_cast<std::size_t>(values_.rows()) != sample_ids_.size()
        || static_cast<std::size_t>(values_.cols()) != feature_names_.size()) {
        throw DimensionError("value matrix is " + std::to_string(values_.rows()) + "x"
                             + std::to_string(values_.cols()) + " but table has " + std::to_string(sample_ids_.size())
                             + " sample(s) and " + std::to_string(feature_names_.size()) + " feature(s)");
    }
    require_unique(feature_names_, "feature name");
    require_unique(sample_ids_, "sample id");
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
        for (Eigen::Index i = 0; i < values_.rows(); ++i) {
            const double v = values_(i, j);
            if (!std::isfinite(v) || v < 0.0) {
                throw DataError("invalid abundance " + std::to_string(v) + " at sample '"
                                + sample_ids_[static_cast<std::size_t>(i)] + "', feature '"
                                + feature_names_[static_cast<std::size_t>(j)] + "'");
            }
        }
    }
    if (labels_) {
        if (labels_->size() != sample_ids_.size()) {
            throw DimensionError("label vector has " + std::to_string(labels_->size()) + " entries for "
                                 + std::to_string(sample_ids_.size()) + " sample(s)");
        }
        for (int y : *labels_) {
            if (y != 0 && y != 1) throw DataError("label must be 0 or 1, got " + std::to_string(y));
        }
    }
}

auto AbundanceTable::labels() const -> const Labels&
{
    if (!labels_) throw StateError("table has no labels");
    return *labels_;
}

auto AbundanceTable::feature_index(const std::string& name) const -> std::optional<std::size_t>
{
    for (std::size_t j = 0; j < feature_names_.size(); ++j) {
        if (feature_names_[j] == name) return j;
    }
    return std::nullopt;
}

auto AbundanceTable::subset(std::span<const std::size_t> rows) const -> AbundanceTable
{
    Matrix v(static_cast<Eigen::Index>(rows.size()), values_.cols());
    std::vector<std::string> ids;
    ids.reserve(rows.size());
    std::optional<Labels> labels;
    if (labels_) labels.emplace();
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto i = rows[k];
        if (i >= sample_ids_.size()) throw DimensionError("row index " + std::to_string(i) + " out of range");
        v.row(static_cast<Eigen::Index>(k)) = values_.row(static_cast<Eigen::Index>(i));
        ids.push_back(sample_ids_[i]);
        if (labels) labels->push_back((*labels_)[i]);
    }
    return {feature_names_, std::move(ids), std::move(v), std::move(labels), metadata_};
}

auto AbundanceTable::with_labels(Labels labels) const -> AbundanceTable
{
    return {feature_names_, sample_ids_, values_, std::move(labels), metadata_};
}

auto AbundanceTable::with_metadata(std::string key, std::string value) const -> AbundanceTable
{
    auto meta = metadata_;
    meta[std::move(key)] = std::move(value);
    return {feature_names_, sample_ids_, values_, labels_, std::move(meta)};
}

auto label_name(int label) -> const char* { return label == kCrc ? "CRC" : "healthy"; }

auto class_counts(const Labels& labels) -> std::array<std::size_t, 2>
{
    std::array<std::size_t, 2> counts{0, 0};
    for (int y : labels) ++counts[y == kCrc ? 1 : 0];
    return counts;
}

auto parse_table(const std::string& text, const std::string& source) -> AbundanceTable
{
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
            if (!line.empty()) return true;
        }
        return false;
    };

    if (!next_line()) throw DataError(source + ": empty file, missing header");
    auto header = split_record(line, line_no, source);
    for (auto& h : header) h = std::string(trim(h));
    if (header.empty() || header[0] != "sample_id") {
        throw DataError(source + ": first header column must be 'sample_id'");
    }
    const bool has_label = header.size() > 1 && header[1] == "label";
    const std::size_t first_feature = has_label ? 2 : 1;
    std::vector<std::string> features(header.begin() + static_cast<std::ptrdiff_t>(first_feature), header.end());
    for (std::size_t j = 0; j < features.size(); ++j) {
        if (features[j].empty()) {
            throw DataError(source + ": missing header name for column " + std::to_string(j + first_feature + 1));
        }
    }
    {
        std::unordered_set<std::string> seen;
        for (const auto& f : header) {
            if (!seen.insert(f).second) throw DataError(source + ": duplicate header name '" + f + "'");
        }
    }

    std::vector<std::string> ids;
    Labels labels;
    std::vector<double> flat;
    while (next_line()) {
        const auto fields = split_record(line, line_no, source);
        if (fields.size() != header.size()) {
            throw DataError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size())
                            + " field(s), found " + std::to_string(fields.size()));
        }
        ids.emplace_back(trim(fields[0]));
        if (has_label) {
            const auto tok = trim(fields[1]);
            if (tok == "healthy") {
                labels.push_back(kHealthy);
            } else if (tok == "CRC") {
                labels.push_back(kCrc);
            } else {
                throw DataError(source + ":" + std::to_string(line_no) + ": unknown label '" + std::string(tok)
                                + "' (expected healthy or CRC)");
            }
        }
        for (std::size_t j = first_feature; j < fields.size(); ++j) {
            auto cell = trim(fields[j]);
            if (!cell.empty() && cell[0] == '+') cell.remove_prefix(1);
            double v = 0.0;
            const auto* last = cell.data() + cell.size();
            auto [ptr, ec] = std::from_chars(cell.data(), last, v);
            if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
                throw DataError(source + ":" + std::to_string(line_no) + ": column '" + header[j]
                                + "': invalid number '" + std::string(cell) + "'");
            }
            if (v < 0.0) {
                throw DataError(source + ":" + std::to_string(line_no) + ": row " + std::to_string(ids.size()) + " (sample '"
                                + ids.back() + "'), column '" + header[j] + "': negative value " + std::string(cell));
            }
            flat.push_back(v);
        }
    }

    const auto n = static_cast<Eigen::Index>(ids.size());
    const auto f = static_cast<Eigen::Index>(features.size());
    Eigen::MatrixXd values(n, f);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < f; ++j) values(i, j) = flat[static_cast<std::size_t>(i * f + j)];
    }
    std::optional<Labels> lab;
    if (has_label) lab = std::move(labels);
    return {std::move(features), std::move(ids), std::move(values), std::move(lab)};
}

auto load_table(const std::filesystem::path& path) -> AbundanceTable
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open table '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_table(ss.str(), path.string());
}

auto format_table(const AbundanceTable& table) -> std::string
{
    std::string out = "sample_id";
    if (table.has_labels()) out += ",label";
    for (const auto& f : table.feature_names()) out += "," + quote_if_needed(f);
    out += '\n';
    char buf[40];
    for (std::size_t i = 0; i < table.rows(); ++i) {
        out += quote_if_needed(table.sample_ids()[i]);
        if (table.has_labels()) {
            out += ',';
            out += label_name(table.labels()[i]);
        }
        for (std::size_t j = 0; j < table.features(); ++j) {
            const double v = table.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            const auto res = std::to_chars(buf, buf + sizeof buf, v);
            out += ',';
            out.append(buf, res.ptr);
        }
        out += '\n';
    }
    return out;
}

void save_table(const AbundanceTable& table, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write table '" + path.string() + "'");
    out << format_table(table);
    if (!out) throw DataError("failed writing table '" + path.string() + "'");
}

} // namespace symbio
