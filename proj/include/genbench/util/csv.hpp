#pragma once

// Minimal RFC 4180 CSV: comma separated, fields optionally double-quoted,
// "" inside quotes for a literal quote. Output uses "\n" line endings and
// quotes only the fields that need it.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace genbench::util {

using CsvRow = std::vector<std::string>;

std::vector<CsvRow> parse_csv(std::string_view text);

std::string csv_field(std::string_view field);
std::string csv_line(const CsvRow& row);

/// Header-addressed view over parsed rows.
class CsvTable {
public:
    static CsvTable read(const std::filesystem::path& path);
    static CsvTable parse(std::string_view text, std::string source = "<csv>");

    const CsvRow& header() const noexcept { return header_; }
    std::size_t size() const noexcept { return rows_.size(); }
    bool has_column(const std::string& name) const { return columns_.contains(name); }

    /// InvalidInput naming the source, line and column when absent.
    const std::string& at(std::size_t row, const std::string& column) const;
    std::optional<std::string> get(std::size_t row, const std::string& column) const;
    double number(std::size_t row, const std::string& column) const;

    /// 1-based line number of a data row, for messages.
    std::size_t line_of(std::size_t row) const noexcept { return row + 2; }
    const std::string& source() const noexcept { return source_; }

private:
    std::string source_;
    CsvRow header_;
    std::map<std::string, std::size_t> columns_;
    std::vector<CsvRow> rows_;
};

}  // namespace genbench::util
