#include "genbench/util/csv.hpp"

#include <cmath>

#include <fmt/format.h>

#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"

namespace genbench::util {

std::vector<CsvRow> parse_csv(std::string_view text) {
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        if (!(row.size() == 1 && row[0].empty())) {
            rows.push_back(std::move(row));
        }
        row.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            end_row();
        } else if (c == '\r') {
            // tolerated before \n
        } else {
            field += c;
            field_started = true;
        }
    }
    if (quoted) {
        throw InvalidInput("csv: unterminated quoted field");
    }
    if (field_started || !field.empty() || !row.empty()) {
        end_row();
    }
    return rows;
}

std::string csv_field(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_line(const CsvRow& row) {
    std::string out;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += csv_field(row[i]);
    }
    out += '\n';
    return out;
}

CsvTable CsvTable::read(const std::filesystem::path& path) {
    return parse(read_text(path), path.string());
}

CsvTable CsvTable::parse(std::string_view text, std::string source) {
    CsvTable t;
    t.source_ = std::move(source);
    auto rows = parse_csv(text);
    if (rows.empty()) {
        throw InvalidInput(fmt::format("{}: empty csv", t.source_));
    }
    t.header_ = std::move(rows.front());
    for (std::size_t i = 0; i < t.header_.size(); ++i) {
        if (!t.columns_.emplace(t.header_[i], i).second) {
            throw InvalidInput(fmt::format("{}: duplicate column '{}'", t.source_, t.header_[i]));
        }
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != t.header_.size()) {
            throw InvalidInput(fmt::format("{}:{}: expected {} fields, got {}", t.source_, r + 1, t.header_.size(),
                                           rows[r].size()));
        }
        t.rows_.push_back(std::move(rows[r]));
    }
    return t;
}

const std::string& CsvTable::at(std::size_t row, const std::string& column) const {
    const auto it = columns_.find(column);
    if (it == columns_.end()) {
        throw InvalidInput(fmt::format("{}: missing column '{}'", source_, column));
    }
    return rows_.at(row)[it->second];
}

std::optional<std::string> CsvTable::get(std::size_t row, const std::string& column) const {
    const auto it = columns_.find(column);
    if (it == columns_.end()) {
        return std::nullopt;
    }
    return rows_.at(row)[it->second];
}

double CsvTable::number(std::size_t row, const std::string& column) const {
    const auto& s = at(row, column);
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v)) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw InvalidInput(fmt::format("{}:{}: column '{}' is not a finite number: '{}'", source_, line_of(row), column, s));
}

}  // namespace genbench::util
