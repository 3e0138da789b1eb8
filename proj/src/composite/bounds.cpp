#include "genbench/composite/bounds.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "genbench/util/error.hpp"

namespace genbench::composite {

std::string_view metric_name(MetricId id) {
    switch (id) {
        case MetricId::Fid: return "FID";
        case MetricId::Is: return "IS";
        case MetricId::Clip: return "CLIP";
        case MetricId::Pick: return "PICK";
    }
    return "?";
}

MetricId parse_metric_id(std::string_view name) {
    std::string upper;
    for (char c : name) {
        upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    if (upper == "FID") return MetricId::Fid;
    if (upper == "IS" || upper == "IS_MEAN") return MetricId::Is;
    if (upper == "CLIP") return MetricId::Clip;
    if (upper == "PICK") return MetricId::Pick;
    throw UnknownMetric(fmt::format("unknown metric id '{}'", name));
}

Orientation natural_orientation(MetricId id) {
    return id == MetricId::Fid ? Orientation::LowerIsBetter : Orientation::HigherIsBetter;
}

double metric_value(const metrics::MetricReport& r, MetricId id) {
    switch (id) {
        case MetricId::Fid: return r.fid;
        case MetricId::Is: return r.is_mean;
        case MetricId::Clip: return r.clip_score;
        case MetricId::Pick: return r.pick_score;
    }
    throw UnknownMetric("unknown metric id");
}

namespace {

std::string_view orientation_name(Orientation o) {
    return o == Orientation::LowerIsBetter ? "lower-is-better" : "higher-is-better";
}

Orientation parse_orientation(const std::string& s) {
    if (s == "lower-is-better") return Orientation::LowerIsBetter;
    if (s == "higher-is-better") return Orientation::HigherIsBetter;
    throw InvalidInput(fmt::format("unknown orientation '{}'", s));
}

}  // namespace

void BoundsRegistry::set(MetricId id, MetricBounds bounds) {
    if (!std::isfinite(bounds.min) || !std::isfinite(bounds.max) || !(bounds.max > bounds.min)) {
        throw InvalidInput(fmt::format("bounds for {}: need max > min, got ({}, {})", metric_name(id), bounds.min,
                                       bounds.max));
    }
    if (bounds.orientation != natural_orientation(id)) {
        throw InvalidInput(fmt::format("bounds for {}: orientation must be {}", metric_name(id),
                                       orientation_name(natural_orientation(id))));
    }
    bounds_[id] = bounds;
}

const MetricBounds& BoundsRegistry::at(MetricId id) const {
    const auto it = bounds_.find(id);
    if (it == bounds_.end()) {
        throw UnknownMetric(fmt::format("metric {} not in bounds registry", metric_name(id)));
    }
    return it->second;
}

void BoundsRegistry::require_complete() const {
    for (auto id : kAllMetrics) {
        (void)at(id);
    }
}

nlohmann::json BoundsRegistry::to_json() const {
    nlohmann::json metrics = nlohmann::json::object();
    for (const auto& [id, b] : bounds_) {
        metrics[std::string(metric_name(id))] = {
            {"min", b.min}, {"max", b.max}, {"orientation", std::string(orientation_name(b.orientation))}};
    }
    return {{"schema_version", 1}, {"dataset", dataset}, {"metrics", metrics}, {"provenance", provenance}};
}

BoundsRegistry BoundsRegistry::from_json(const nlohmann::json& j) {
    BoundsRegistry reg;
    try {
        if (j.at("schema_version").get<int>() != 1) {
            throw InvalidInput("bounds: unsupported schema_version");
        }
        reg.dataset = j.value("dataset", std::string());
        reg.provenance = j.value("provenance", std::vector<std::string>{});
        for (const auto& [name, entry] : j.at("metrics").items()) {
            const auto id = parse_metric_id(name);
            reg.set(id, {entry.at("min").get<double>(), entry.at("max").get<double>(),
                         parse_orientation(entry.value("orientation", std::string(orientation_name(natural_orientation(id)))))});
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("bounds: {}", e.what()));
    }
    reg.require_complete();
    return reg;
}

BoundsRegistry BoundsRegistry::published_imagenet() {
    BoundsRegistry reg;
    reg.dataset = "imagenet";
    reg.set(MetricId::Fid, {2.61, 317.55, Orientation::LowerIsBetter});
    reg.set(MetricId::Is, {1.53, 382.36, Orientation::HigherIsBetter});
    reg.set(MetricId::Clip, {20.39, 32.10, Orientation::HigherIsBetter});
    reg.set(MetricId::Pick, {16.89, 22.13, Orientation::HigherIsBetter});
    reg.provenance = {"published"};
    return reg;
}

BoundsRegistry compute_bounds(std::span<const KeyedReport> reports, std::span<const RunKey> exclusions,
                              std::string dataset) {
    std::vector<const KeyedReport*> included;
    for (const auto& r : reports) {
        if (std::find(exclusions.begin(), exclusions.end(), r.key) == exclusions.end()) {
            included.push_back(&r);
        }
    }
    if (included.size() < 2) {
        throw InsufficientSamples(fmt::format("compute_bounds: need >= 2 reports after exclusions, got {}", included.size()));
    }
    BoundsRegistry reg;
    reg.dataset = std::move(dataset);
    for (auto id : kAllMetrics) {
        double lo = metric_value(included.front()->report, id);
        double hi = lo;
        for (const auto* r : included) {
            const double v = metric_value(r->report, id);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (!(hi > lo)) {
            throw InvalidInput(fmt::format("compute_bounds: degenerate range for {} (min == max == {})", metric_name(id), lo));
        }
        reg.set(id, {lo, hi, natural_orientation(id)});
    }
    for (const auto* r : included) {
        reg.provenance.push_back(r->key.to_string());
    }
    return reg;
}

}  // namespace genbench::composite
