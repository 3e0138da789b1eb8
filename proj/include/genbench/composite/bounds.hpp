#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "genbench/metrics/report.hpp"
#include "genbench/run_key.hpp"

namespace genbench::composite {

enum class MetricId { Fid, Is, Clip, Pick };
enum class Orientation { LowerIsBetter, HigherIsBetter };

inline constexpr std::array<MetricId, 4> kAllMetrics{MetricId::Fid, MetricId::Is, MetricId::Clip, MetricId::Pick};

std::string_view metric_name(MetricId id);  ///< "FID", "IS", "CLIP", "PICK"
MetricId parse_metric_id(std::string_view name);  ///< throws UnknownMetric
Orientation natural_orientation(MetricId id);
double metric_value(const metrics::MetricReport& r, MetricId id);

struct MetricBounds {
    double min = 0.0;
    double max = 1.0;
    Orientation orientation = Orientation::HigherIsBetter;
};

/// Per-metric min/max and orientation used to turn raw metrics into utilities.
/// Persisted as bounds.json; never recomputed implicitly.
class BoundsRegistry {
public:
    BoundsRegistry() = default;

    /// Validates max > min and the fixed orientation of each metric.
    void set(MetricId id, MetricBounds bounds);
    bool contains(MetricId id) const { return bounds_.count(id) > 0; }
    const MetricBounds& at(MetricId id) const;  ///< UnknownMetric when absent

    /// Throws unless all four metrics are present.
    void require_complete() const;

    std::string dataset;
    std::vector<std::string> provenance;

    nlohmann::json to_json() const;
    static BoundsRegistry from_json(const nlohmann::json& j);

    /// ImageNet bounds published with the benchmark.
    static BoundsRegistry published_imagenet();

private:
    std::map<MetricId, MetricBounds> bounds_;
};

struct KeyedReport {
    RunKey key;
    metrics::MetricReport report;
};

/// Per-metric min/max over the reports not listed in `exclusions`.
/// Needs at least two included reports and a non-degenerate range for every metric.
BoundsRegistry compute_bounds(std::span<const KeyedReport> reports, std::span<const RunKey> exclusions,
                              std::string dataset);

}  // namespace genbench::composite
