#include "genbench/composite/mmhm.hpp"

#include <algorithm>
#include <cmath>

#include "genbench/util/error.hpp"

namespace genbench::composite {

double normalize(MetricId id, double value, const BoundsRegistry& bounds) {
    const auto& b = bounds.at(id);
    const double range = b.max - b.min;
    const double u = b.orientation == Orientation::LowerIsBetter ? (b.max - value) / range : (value - b.min) / range;
    return std::max(0.0, u);
}

double normalize(std::string_view metric_id, double value, const BoundsRegistry& bounds) {
    return normalize(parse_metric_id(metric_id), value, bounds);
}

double harmonic_mmhm(std::span<const double, 4> utilities, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw InvalidInput("mmhm: epsilon must be positive");
    }
    std::array<double, 4> terms{};
    for (std::size_t i = 0; i < 4; ++i) {
        terms[i] = epsilon + utilities[i];
    }
    // the harmonic mean of equal terms is that term
    if (std::all_of(terms.begin(), terms.end(), [&](double t) { return t == terms[0]; })) {
        return terms[0];
    }
    double inv_sum = 0.0;
    for (double t : terms) {
        inv_sum += 1.0 / t;
    }
    return 4.0 / inv_sum;
}

MmhmScore mmhm(const metrics::MetricReport& report, const BoundsRegistry& bounds, double epsilon) {
    report.validate();
    MmhmScore score;
    score.epsilon = epsilon;
    for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
        score.utilities[i] = normalize(kAllMetrics[i], metric_value(report, kAllMetrics[i]), bounds);
    }
    score.value = harmonic_mmhm(score.utilities, epsilon);
    return score;
}

std::vector<ScoredRun> rank_configs(std::vector<ScoredRun> runs) {
    if (runs.empty()) {
        throw InvalidInput("rank_configs: empty list");
    }
    std::stable_sort(runs.begin(), runs.end(), [](const ScoredRun& a, const ScoredRun& b) {
        if (a.score.value != b.score.value) {
            return a.score.value > b.score.value;
        }
        if (a.report.fid != b.report.fid) {
            return a.report.fid < b.report.fid;
        }
        return a.key < b.key;
    });
    return runs;
}

}  // namespace genbench::composite
