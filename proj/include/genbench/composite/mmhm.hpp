#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "genbench/composite/bounds.hpp"
#include "genbench/metrics/report.hpp"
#include "genbench/run_key.hpp"

namespace genbench::composite {

inline constexpr double kDefaultEpsilon = 0.001;

/// Orientation-aware min-max utility, floored at 0 and not capped at 1:
/// lower-is-better -> (max - x) / (max - min); higher-is-better -> (x - min) / (max - min).
double normalize(MetricId id, double value, const BoundsRegistry& bounds);
double normalize(std::string_view metric_id, double value, const BoundsRegistry& bounds);

struct MmhmScore {
    double value = 0.0;
    std::array<double, 4> utilities{};  ///< FID, IS, CLIP, PICK order
    double epsilon = kDefaultEpsilon;
};

/// MinMax Harmonic Mean: 4 / Σ (ε + u_x)^-1 over the four utilities.
MmhmScore mmhm(const metrics::MetricReport& report, const BoundsRegistry& bounds, double epsilon = kDefaultEpsilon);

/// Harmonic mean of (ε + u) for precomputed utilities.
double harmonic_mmhm(std::span<const double, 4> utilities, double epsilon);

struct ScoredRun {
    RunKey key;
    MmhmScore score;
    metrics::MetricReport report;
};

/// Descending full-precision MMHM; ties go to lower FID, then RunKey order.
std::vector<ScoredRun> rank_configs(std::vector<ScoredRun> runs);

}  // namespace genbench::composite
