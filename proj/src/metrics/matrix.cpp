#include "genbench/metrics/matrix.hpp"

#include <cmath>
#include <unordered_set>

#include <fmt/format.h>

#include "genbench/util/error.hpp"

namespace genbench::metrics {
namespace {

std::vector<std::string> checked_ids(std::vector<std::string> ids, std::size_t rows, const char* what) {
    if (ids.empty()) {
        ids.reserve(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            ids.push_back(std::to_string(i));
        }
        return ids;
    }
    if (ids.size() != rows) {
        throw InvalidInput(fmt::format("{}: {} ids for {} rows", what, ids.size(), rows));
    }
    std::unordered_set<std::string> seen;
    seen.reserve(ids.size());
    for (const auto& id : ids) {
        if (!seen.insert(id).second) {
            throw InvalidInput(fmt::format("{}: duplicate id '{}'", what, id));
        }
    }
    return ids;
}

void check_shape(std::size_t rows, std::size_t cols, std::size_t size, const char* what) {
    if (rows < 1) {
        throw InvalidInput(fmt::format("{}: needs at least one row", what));
    }
    if (cols < 1) {
        throw InvalidInput(fmt::format("{}: needs at least one column", what));
    }
    if (size != rows * cols) {
        throw InvalidInput(fmt::format("{}: {} values for a {}x{} matrix", what, size, rows, cols));
    }
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> data,
                             std::vector<std::string> ids)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    check_shape(rows_, cols_, data_.size(), "feature matrix");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            throw InvalidInput(fmt::format("feature matrix: non-finite value at row {} col {}", i / cols_, i % cols_));
        }
    }
    ids_ = checked_ids(std::move(ids), rows_, "feature matrix");
}

FeatureMatrix FeatureMatrix::from_rows(const std::vector<std::vector<double>>& rows,
                                       std::vector<std::string> ids) {
    if (rows.empty()) {
        throw InvalidInput("feature matrix: needs at least one row");
    }
    const auto cols = rows.front().size();
    std::vector<double> data;
    data.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        if (r.size() != cols) {
            throw InvalidInput("feature matrix: ragged rows");
        }
        data.insert(data.end(), r.begin(), r.end());
    }
    return FeatureMatrix(rows.size(), cols, std::move(data), std::move(ids));
}

ProbabilityMatrix::ProbabilityMatrix(std::size_t rows, std::size_t cols, std::vector<double> data,
                                     std::vector<std::string> ids)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    check_shape(rows_, cols_, data_.size(), "probability matrix");
    for (std::size_t r = 0; r < rows_; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < cols_; ++c) {
            const double p = data_[r * cols_ + c];
            if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
                throw InvalidInput(fmt::format("probability matrix: entry ({}, {}) = {} outside [0, 1]", r, c, p));
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kProbabilityRowTolerance) {
            throw InvalidInput(fmt::format("probability matrix: row {} sums to {}", r, sum));
        }
    }
    ids_ = checked_ids(std::move(ids), rows_, "probability matrix");
}

}  // namespace genbench::metrics
