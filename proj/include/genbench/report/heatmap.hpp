#pragma once

#include <optional>
#include <string>
#include <vector>

#include "genbench/composite/bounds.hpp"
#include "genbench/report/table.hpp"

namespace genbench::report {

/// The five heatmap panels: the four raw metrics plus MMHM.
enum class HeatmapMetric { Fid, Is, Clip, Pick, Mmhm };
inline constexpr HeatmapMetric kHeatmapMetrics[] = {HeatmapMetric::Fid, HeatmapMetric::Is, HeatmapMetric::Clip,
                                                    HeatmapMetric::Pick, HeatmapMetric::Mmhm};

std::string heatmap_metric_name(HeatmapMetric m);  ///< "fid", "is", "clip", "pick", "mmhm"

struct HeatmapGrid {
    HeatmapMetric metric = HeatmapMetric::Mmhm;
    std::string model;
    std::string dataset;
    std::vector<double> cfgs;                ///< rows
    std::vector<Steps> steps;                ///< columns
    std::vector<std::optional<double>> cells;  ///< row-major; nullopt = missing
    bool lower_is_better = false;

    const std::optional<double>& at(std::size_t r, std::size_t c) const { return cells[r * steps.size() + c]; }
};

/// Axis values for heatmaps. Empty vectors mean "the sorted distinct values present".
struct HeatmapAxes {
    std::vector<double> cfgs;
    std::vector<Steps> steps;
};

/// Five grids over one model and dataset. Rows spanning several models or
/// datasets, duplicate cells, and values outside explicit axes are InvalidInput.
std::vector<HeatmapGrid> build_heatmaps(const std::vector<MetricsRow>& rows, const composite::BoundsRegistry& bounds,
                                        const HeatmapAxes& axes = {});

/// Columns cfg, steps, value; cfg-major; empty value for a missing cell.
std::string heatmap_csv(const HeatmapGrid& grid);

/// Presentational rendering of the CSV: min-max colour scale over present
/// cells (reversed for FID), missing cells hatched.
std::string heatmap_svg(const HeatmapGrid& grid);

}  // namespace genbench::report
