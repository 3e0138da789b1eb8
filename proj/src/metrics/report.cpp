#include "genbench/metrics/report.hpp"

#include <cmath>

#include <fmt/format.h>

#include "genbench/util/error.hpp"

namespace genbench::metrics {

void MetricReport::validate() const {
    for (double v : {fid, is_mean, is_std, clip_score, pick_score}) {
        if (!std::isfinite(v)) {
            throw InvalidInput("metric report: non-finite value");
        }
    }
    if (fid < -1e-8) {
        throw InvalidInput(fmt::format("metric report: negative FID {}", fid));
    }
    if (is_std < 0.0) {
        throw InvalidInput("metric report: negative IS std");
    }
}

nlohmann::json to_json(const MetricReport& r) {
    return {{"fid", r.fid}, {"is_mean", r.is_mean}, {"is_std", r.is_std}, {"clip", r.clip_score}, {"pick", r.pick_score}};
}

MetricReport metric_report_from_json(const nlohmann::json& j) {
    MetricReport r;
    try {
        r.fid = j.at("fid").get<double>();
        r.is_mean = j.at("is_mean").get<double>();
        r.is_std = j.value("is_std", 0.0);
        r.clip_score = j.at("clip").get<double>();
        r.pick_score = j.at("pick").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("metric report json: {}", e.what()));
    }
    r.validate();
    return r;
}

}  // namespace genbench::metrics
