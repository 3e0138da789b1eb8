#pragma once

#include <cstddef>

#include <Eigen/Dense>
#include <json.hpp>

#include "genbench/metrics/matrix.hpp"

namespace genbench::metrics {

/// Mean, unbiased covariance and sample count of a feature distribution.
struct GaussianStats {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    std::size_t n = 0;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(mean.size()); }

    /// Throws InvalidInput unless n >= 2, shapes agree, cov is symmetric to 1e-9
    /// relative and its diagonal is >= -1e-12.
    void validate() const;

    nlohmann::json to_json() const;
    static GaussianStats from_json(const nlohmann::json& j);
};

/// Mergeable running moments (count, mean, centered co-moment matrix).
///
/// Batches are folded in with a two-pass mean/co-moment on the batch followed by
/// the pairwise combination rule, so two accumulators built on disjoint batches
/// merge into the moments of the concatenation.
class StatsAccumulator {
public:
    StatsAccumulator() = default;
    explicit StatsAccumulator(std::size_t dim);

    void add(const FeatureMatrix& batch);
    void add_row(std::span<const double> row);
    void merge(const StatsAccumulator& other);

    std::size_t count() const noexcept { return n_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }

    /// Sample mean and (n-1)-normalized covariance; InsufficientSamples below 2 rows.
    GaussianStats finalize() const;

private:
    void merge_moments(std::size_t n, const Eigen::VectorXd& mean, const Eigen::MatrixXd& comoment);

    std::size_t n_ = 0;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd comoment_;
};

GaussianStats accumulate_stats(const FeatureMatrix& features);

}  // namespace genbench::metrics
