#include "genbench/metrics/gaussian.hpp"

#include <cmath>

#include <fmt/format.h>

#include "genbench/util/error.hpp"

namespace genbench::metrics {

void GaussianStats::validate() const {
    if (n < 2) {
        throw InsufficientSamples(fmt::format("gaussian stats need n >= 2, got {}", n));
    }
    const auto d = mean.size();
    if (d < 1 || cov.rows() != d || cov.cols() != d) {
        throw DimensionMismatch(fmt::format("gaussian stats: mean has {} entries, cov is {}x{}", d, cov.rows(), cov.cols()));
    }
    if (!mean.allFinite() || !cov.allFinite()) {
        throw InvalidInput("gaussian stats: non-finite entries");
    }
    const double scale = std::max(cov.cwiseAbs().maxCoeff(), 1e-300);
    const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * scale) {
        throw InvalidInput(fmt::format("gaussian stats: covariance not symmetric (max asymmetry {:g})", asym));
    }
    if (cov.diagonal().minCoeff() < -1e-12) {
        throw InvalidInput("gaussian stats: negative covariance diagonal");
    }
}

nlohmann::json GaussianStats::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < cov.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < cov.cols(); ++c) {
            row.push_back(cov(r, c));
        }
        rows.push_back(std::move(row));
    }
    return {{"n", n}, {"mean", std::vector<double>(mean.data(), mean.data() + mean.size())}, {"cov", std::move(rows)}};
}

GaussianStats GaussianStats::from_json(const nlohmann::json& j) {
    GaussianStats s;
    try {
        s.n = j.at("n").get<std::size_t>();
        const auto mean = j.at("mean").get<std::vector<double>>();
        const auto cov = j.at("cov").get<std::vector<std::vector<double>>>();
        const auto d = static_cast<Eigen::Index>(mean.size());
        s.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), d);
        if (static_cast<Eigen::Index>(cov.size()) != d) {
            throw DimensionMismatch("gaussian stats json: cov rows != mean length");
        }
        s.cov.resize(d, d);
        for (Eigen::Index r = 0; r < d; ++r) {
            if (static_cast<Eigen::Index>(cov[r].size()) != d) {
                throw DimensionMismatch("gaussian stats json: ragged cov");
            }
            for (Eigen::Index c = 0; c < d; ++c) {
                s.cov(r, c) = cov[r][c];
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("gaussian stats json: {}", e.what()));
    }
    s.validate();
    return s;
}

StatsAccumulator::StatsAccumulator(std::size_t dim)
    : mean_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim))),
      comoment_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))) {}

void StatsAccumulator::merge_moments(std::size_t n, const Eigen::VectorXd& mean, const Eigen::MatrixXd& comoment) {
    if (n == 0) {
        return;
    }
    if (n_ == 0) {
        n_ = n;
        mean_ = mean;
        comoment_ = comoment;
        return;
    }
    if (mean.size() != mean_.size()) {
        throw DimensionMismatch(fmt::format("stats merge: dimension {} vs {}", mean_.size(), mean.size()));
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(n);
    const double total = na + nb;
    const Eigen::VectorXd delta = mean - mean_;
    mean_ += delta * (nb / total);
    comoment_ += comoment;
    comoment_.noalias() += (delta * delta.transpose()) * (na * nb / total);
    n_ += n;
}

void StatsAccumulator::add(const FeatureMatrix& batch) {
    const auto rows = static_cast<Eigen::Index>(batch.rows());
    const auto cols = static_cast<Eigen::Index>(batch.cols());
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
        batch.data().data(), rows, cols);
    const Eigen::VectorXd mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
    Eigen::MatrixXd comoment = centered.transpose() * centered;
    comoment = 0.5 * (comoment + comoment.transpose()).eval();
    merge_moments(batch.rows(), mean, comoment);
}

void StatsAccumulator::add_row(std::span<const double> row) {
    for (double v : row) {
        if (!std::isfinite(v)) {
            throw InvalidInput("stats accumulator: non-finite value");
        }
    }
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size()));
    merge_moments(1, x, Eigen::MatrixXd::Zero(x.size(), x.size()));
}

void StatsAccumulator::merge(const StatsAccumulator& other) { merge_moments(other.n_, other.mean_, other.comoment_); }

GaussianStats StatsAccumulator::finalize() const {
    if (n_ < 2) {
        throw InsufficientSamples(fmt::format("need at least 2 samples for covariance, got {}", n_));
    }
    GaussianStats s;
    s.n = n_;
    s.mean = mean_;
    s.cov = comoment_ / static_cast<double>(n_ - 1);
    return s;
}

GaussianStats accumulate_stats(const FeatureMatrix& features) {
    if (features.rows() < 2) {
        throw InsufficientSamples(fmt::format("need at least 2 rows, got {}", features.rows()));
    }
    StatsAccumulator acc;
    acc.add(features);
    return acc.finalize();
}

}  // namespace genbench::metrics
