#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "genbench/composite/bounds.hpp"
#include "genbench/composite/mmhm.hpp"
#include "genbench/metrics/report.hpp"
#include "genbench/run_key.hpp"

namespace genbench::report {

/// One scored configuration as read from a metrics CSV or a run report.
struct MetricsRow {
    RunKey key;
    std::string family;  ///< model id when not given
    metrics::MetricReport report;
};

/// Metrics CSV. Required columns: model, steps, cfg, dataset, fid, is_mean, clip,
/// pick. Optional: family, seed, is_std. Any other column (for instance a
/// printed mmhm) is ignored; MMHM is always recomputed.
std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);
std::vector<MetricsRow> parse_metrics_csv(const std::string& text, const std::string& source = "<csv>");

/// Writes model, steps, cfg, dataset, seed, fid, is_mean, is_std, clip, pick.
std::string metrics_csv(const std::vector<MetricsRow>& rows);

struct TableRow {
    MetricsRow row;
    composite::MmhmScore score;
    bool best_in_family = false;
};

/// Rows in input order. Exactly one best row per (family, dataset): the first
/// entry of rank_configs over that group.
struct BenchmarkTable {
    std::vector<TableRow> rows;
};

BenchmarkTable build_table(const std::vector<MetricsRow>& rows, const composite::BoundsRegistry& bounds,
                           double epsilon = composite::kDefaultEpsilon);

/// Columns: model, steps, cfg, dataset, fid, is_mean, is_std, clip, pick, mmhm, best_in_family.
/// Numbers are written as shortest round-trip decimals.
std::string table_csv(const BenchmarkTable& table);

/// Fixed-width text rendering (metrics to 2 decimals, MMHM to 4, best rows starred).
std::string table_text(const BenchmarkTable& table);

/// One "run_key<TAB>mmhm" line per row, for the `score` command.
std::string score_lines(const BenchmarkTable& table);

}  // namespace genbench::report
