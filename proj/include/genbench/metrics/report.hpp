#pragma once

#include <json.hpp>

namespace genbench::metrics {

/// The four raw metrics of one (model, cfg, steps, dataset) run.
struct MetricReport {
    double fid = 0.0;
    double is_mean = 1.0;
    double is_std = 0.0;
    double clip_score = 0.0;
    double pick_score = 0.0;

    /// Throws InvalidInput on non-finite values, negative FID beyond -1e-8, or negative IS std.
    void validate() const;

    friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

nlohmann::json to_json(const MetricReport& r);
MetricReport metric_report_from_json(const nlohmann::json& j);

}  // namespace genbench::metrics
