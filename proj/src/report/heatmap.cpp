#include "genbench/report/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "genbench/util/csv.hpp"
#include "genbench/util/error.hpp"

namespace genbench::report {
namespace {

double metric_of(const MetricsRow& r, HeatmapMetric m, const composite::BoundsRegistry& bounds) {
    switch (m) {
        case HeatmapMetric::Fid: return r.report.fid;
        case HeatmapMetric::Is: return r.report.is_mean;
        case HeatmapMetric::Clip: return r.report.clip_score;
        case HeatmapMetric::Pick: return r.report.pick_score;
        case HeatmapMetric::Mmhm: return composite::mmhm(r.report, bounds).value;
    }
    return 0.0;
}

std::string title_of(HeatmapMetric m) {
    switch (m) {
        case HeatmapMetric::Fid: return "FID";
        case HeatmapMetric::Is: return "IS";
        case HeatmapMetric::Clip: return "CLIP Score";
        case HeatmapMetric::Pick: return "Pick Score";
        case HeatmapMetric::Mmhm: return "MMHM";
    }
    return {};
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Piecewise-linear blue -> yellow ramp, t in [0, 1].
std::string ramp(double t) {
    static constexpr double stops[][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
    t = std::clamp(t, 0.0, 1.0) * 4.0;
    const auto i = std::min<std::size_t>(3, static_cast<std::size_t>(t));
    const double f = t - static_cast<double>(i);
    int rgb[3];
    for (int k = 0; k < 3; ++k) {
        rgb[k] = static_cast<int>(std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k])));
    }
    return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

}  // namespace

std::string heatmap_metric_name(HeatmapMetric m) {
    switch (m) {
        case HeatmapMetric::Fid: return "fid";
        case HeatmapMetric::Is: return "is";
        case HeatmapMetric::Clip: return "clip";
        case HeatmapMetric::Pick: return "pick";
        case HeatmapMetric::Mmhm: return "mmhm";
    }
    return {};
}

std::vector<HeatmapGrid> build_heatmaps(const std::vector<MetricsRow>& rows, const composite::BoundsRegistry& bounds,
                                        const HeatmapAxes& axes) {
    if (rows.empty()) {
        throw InvalidInput("heatmap: no rows");
    }
    bounds.require_complete();
    const auto& model = rows.front().key.model;
    const auto& dataset = rows.front().key.dataset;
    for (const auto& r : rows) {
        if (r.key.model != model || r.key.dataset != dataset) {
            throw InvalidInput(fmt::format("heatmap: rows mix {}/{} with {}/{}; filter to one model and dataset", model,
                                           dataset, r.key.model, r.key.dataset));
        }
    }
    std::vector<double> cfgs = axes.cfgs;
    std::vector<Steps> steps = axes.steps;
    if (cfgs.empty()) {
        std::set<double> s;
        for (const auto& r : rows) s.insert(r.key.cfg);
        cfgs.assign(s.begin(), s.end());
    }
    if (steps.empty()) {
        std::set<Steps> s;
        for (const auto& r : rows) s.insert(r.key.steps);
        steps.assign(s.begin(), s.end());
    }
    std::map<std::pair<std::size_t, std::size_t>, const MetricsRow*> placed;
    for (const auto& r : rows) {
        const auto ci = std::find(cfgs.begin(), cfgs.end(), r.key.cfg) - cfgs.begin();
        const auto si = std::find(steps.begin(), steps.end(), r.key.steps) - steps.begin();
        if (ci == static_cast<long>(cfgs.size()) || si == static_cast<long>(steps.size())) {
            throw InvalidInput(fmt::format("heatmap: {} lies outside the grid axes", r.key.to_string()));
        }
        if (!placed.emplace(std::pair{std::size_t(ci), std::size_t(si)}, &r).second) {
            throw InvalidInput(fmt::format("heatmap: two rows for cfg={} steps={}", format_cfg(r.key.cfg),
                                           r.key.steps.to_string()));
        }
    }
    std::vector<HeatmapGrid> grids;
    for (auto m : kHeatmapMetrics) {
        HeatmapGrid g;
        g.metric = m;
        g.model = model;
        g.dataset = dataset;
        g.cfgs = cfgs;
        g.steps = steps;
        g.lower_is_better = m == HeatmapMetric::Fid;
        g.cells.resize(cfgs.size() * steps.size());
        for (const auto& [pos, row] : placed) {
            g.cells[pos.first * steps.size() + pos.second] = metric_of(*row, m, bounds);
        }
        grids.push_back(std::move(g));
    }
    return grids;
}

std::string heatmap_csv(const HeatmapGrid& grid) {
    std::string out = util::csv_line({"cfg", "steps", "value"});
    for (std::size_t r = 0; r < grid.cfgs.size(); ++r) {
        for (std::size_t c = 0; c < grid.steps.size(); ++c) {
            const auto& v = grid.at(r, c);
            out += util::csv_line(
                {format_cfg(grid.cfgs[r]), grid.steps[c].to_string(), v ? fmt::format("{}", *v) : std::string()});
        }
    }
    return out;
}

std::string heatmap_svg(const HeatmapGrid& grid) {
    constexpr int cell_w = 72, cell_h = 40, left = 70, top = 56, bottom = 44;
    const int cols = static_cast<int>(grid.steps.size());
    const int rows = static_cast<int>(grid.cfgs.size());
    const int width = left + cols * cell_w + 20;
    const int height = top + rows * cell_h + bottom;

    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const auto& v : grid.cells) {
        if (!v) continue;
        lo = any ? std::min(lo, *v) : *v;
        hi = any ? std::max(hi, *v) : *v;
        any = true;
    }
    const int decimals = grid.metric == HeatmapMetric::Mmhm ? 3 : 2;

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n",
        width, height, width, height);
    svg += "<defs><pattern id=\"hatch\" width=\"8\" height=\"8\" patternUnits=\"userSpaceOnUse\" "
           "patternTransform=\"rotate(45)\"><rect width=\"8\" height=\"8\" fill=\"#ffffff\"/>"
           "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" stroke=\"#999999\" stroke-width=\"3\"/></pattern></defs>\n";
    svg += fmt::format("<text x=\"{}\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">{} - {} ({})</text>\n",
                       width / 2, xml_escape(title_of(grid.metric)), xml_escape(grid.model), xml_escape(grid.dataset));
    for (int c = 0; c < cols; ++c) {
        svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", left + c * cell_w + cell_w / 2,
                           top - 8, xml_escape(grid.steps[c].to_string()));
    }
    for (int r = 0; r < rows; ++r) {
        svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", left - 8,
                           top + r * cell_h + cell_h / 2 + 4, xml_escape(format_cfg(grid.cfgs[r])));
        for (int c = 0; c < cols; ++c) {
            const auto& v = grid.at(r, c);
            const int x = left + c * cell_w;
            const int y = top + r * cell_h;
            if (!v) {
                svg += fmt::format(
                    "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"url(#hatch)\" stroke=\"#ffffff\"/>\n", x,
                    y, cell_w, cell_h);
                continue;
            }
            double t = hi > lo ? (*v - lo) / (hi - lo) : 0.5;
            if (grid.lower_is_better) t = 1.0 - t;
            svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"#ffffff\"/>\n",
                               x, y, cell_w, cell_h, ramp(t));
            svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"{}\">{:.{}f}</text>\n",
                               x + cell_w / 2, y + cell_h / 2 + 4, t > 0.6 ? "#000000" : "#ffffff", *v, decimals);
        }
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">steps</text>\n", left + cols * cell_w / 2,
                       top + rows * cell_h + 28);
    svg += fmt::format("<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">CFG</text>\n",
                       top + rows * cell_h / 2, top + rows * cell_h / 2);
    svg += "</svg>\n";
    return svg;
}

}  // namespace genbench::report
