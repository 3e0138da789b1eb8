#include "genbench/report/table.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "genbench/util/csv.hpp"
#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"

namespace genbench::report {
namespace {

std::string num(double v) {
    return fmt::format("{}", v);
}

}  // namespace

std::vector<MetricsRow> parse_metrics_csv(const std::string& text, const std::string& source) {
    const auto t = util::CsvTable::parse(text, source);
    std::vector<MetricsRow> rows;
    rows.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        MetricsRow r;
        r.key.model = t.at(i, "model");
        if (r.key.model.empty()) {
            throw InvalidInput(fmt::format("{}:{}: empty model", source, t.line_of(i)));
        }
        try {
            r.key.steps = Steps::parse(t.at(i, "steps"));
        } catch (const InvalidInput& e) {
            throw InvalidInput(fmt::format("{}:{}: {}", source, t.line_of(i), e.what()));
        }
        r.key.cfg = t.number(i, "cfg");
        r.key.dataset = t.at(i, "dataset");
        if (const auto seed = t.get(i, "seed"); seed && !seed->empty()) {
            r.key.seed = static_cast<long long>(t.number(i, "seed"));
        }
        const auto family = t.get(i, "family");
        r.family = family && !family->empty() ? *family : r.key.model;
        r.report.fid = t.number(i, "fid");
        r.report.is_mean = t.number(i, "is_mean");
        if (const auto s = t.get(i, "is_std"); s && !s->empty()) {
            r.report.is_std = t.number(i, "is_std");
        }
        r.report.clip_score = t.number(i, "clip");
        r.report.pick_score = t.number(i, "pick");
        try {
            r.report.validate();
        } catch (const InvalidInput& e) {
            throw InvalidInput(fmt::format("{}:{}: {}", source, t.line_of(i), e.what()));
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path) {
    return parse_metrics_csv(util::read_text(path), path.string());
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out = util::csv_line(
        {"model", "family", "steps", "cfg", "dataset", "seed", "fid", "is_mean", "is_std", "clip", "pick"});
    for (const auto& r : rows) {
        out += util::csv_line({r.key.model, r.family, r.key.steps.to_string(), format_cfg(r.key.cfg), r.key.dataset,
                               std::to_string(r.key.seed), num(r.report.fid), num(r.report.is_mean),
                               num(r.report.is_std), num(r.report.clip_score), num(r.report.pick_score)});
    }
    return out;
}

BenchmarkTable build_table(const std::vector<MetricsRow>& rows, const composite::BoundsRegistry& bounds,
                           double epsilon) {
    bounds.require_complete();
    BenchmarkTable table;
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
    std::set<RunKey> keys;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!keys.insert(rows[i].key).second) {
            throw InvalidInput(fmt::format("duplicate row for {}", rows[i].key.to_string()));
        }
        table.rows.push_back({rows[i], composite::mmhm(rows[i].report, bounds, epsilon), false});
        groups[{rows[i].family, rows[i].key.dataset}].push_back(i);
    }
    for (const auto& [group, members] : groups) {
        std::vector<composite::ScoredRun> scored;
        for (auto i : members) {
            scored.push_back({table.rows[i].row.key, table.rows[i].score, table.rows[i].row.report});
        }
        const auto best = composite::rank_configs(std::move(scored)).front().key;
        for (auto i : members) {
            if (table.rows[i].row.key == best) {
                table.rows[i].best_in_family = true;
                break;
            }
        }
    }
    return table;
}

std::string table_csv(const BenchmarkTable& table) {
    std::string out = util::csv_line(
        {"model", "steps", "cfg", "dataset", "fid", "is_mean", "is_std", "clip", "pick", "mmhm", "best_in_family"});
    for (const auto& t : table.rows) {
        const auto& r = t.row;
        out += util::csv_line({r.key.model, r.key.steps.to_string(), format_cfg(r.key.cfg), r.key.dataset,
                               num(r.report.fid), num(r.report.is_mean), num(r.report.is_std),
                               num(r.report.clip_score), num(r.report.pick_score), num(t.score.value),
                               t.best_in_family ? "true" : "false"});
    }
    return out;
}

std::string table_text(const BenchmarkTable& table) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"Model", "Steps", "CFG", "Dataset", "FID", "IS", "CLIP", "Pick", "MMHM", "Best"});
    for (const auto& t : table.rows) {
        const auto& r = t.row;
        cells.push_back({r.key.model, r.key.steps.to_string(), format_cfg(r.key.cfg), r.key.dataset,
                         fmt::format("{:.2f}", r.report.fid), fmt::format("{:.2f}", r.report.is_mean),
                         fmt::format("{:.2f}", r.report.clip_score), fmt::format("{:.2f}", r.report.pick_score),
                         fmt::format("{:.4f}", t.score.value), t.best_in_family ? "*" : ""});
    }
    std::vector<std::size_t> width(cells.front().size(), 0);
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    std::string out;
    for (std::size_t r = 0; r < cells.size(); ++r) {
        std::string line;
        for (std::size_t c = 0; c < cells[r].size(); ++c) {
            // Text columns left-aligned, numeric columns right-aligned.
            const bool left = c == 0 || c == 3 || c == 9;
            line += left ? fmt::format("{:<{}}", cells[r][c], width[c]) : fmt::format("{:>{}}", cells[r][c], width[c]);
            if (c + 1 < cells[r].size()) line += "  ";
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
        if (r == 0) {
            std::size_t total = 0;
            for (auto w : width) total += w + 2;
            out += std::string(total - 2, '-') + "\n";
        }
    }
    return out;
}

std::string score_lines(const BenchmarkTable& table) {
    std::string out;
    for (const auto& t : table.rows) {
        out += fmt::format("{}\t{:.4f}\n", t.row.key.to_string(), t.score.value);
    }
    return out;
}

}  // namespace genbench::report
