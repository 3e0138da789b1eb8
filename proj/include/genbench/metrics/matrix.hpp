#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace genbench::metrics {

/// Row-major sample-by-feature matrix with one identifier per row.
///
/// Construction validates the invariants: at least one row, every value
/// finite, ids unique and one per row. Passing no ids numbers the rows "0".."n-1".
class FeatureMatrix {
public:
    FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> data,
                  std::vector<std::string> ids = {});

    static FeatureMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                   std::vector<std::string> ids = {});

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> data() const noexcept { return data_; }
    const std::vector<std::string>& ids() const noexcept { return ids_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
    std::vector<std::string> ids_;
};

/// Per-sample class posteriors p(y|x). Rows sum to 1 within 1e-6, entries in [0, 1].
class ProbabilityMatrix {
public:
    ProbabilityMatrix(std::size_t rows, std::size_t cols, std::vector<double> data,
                      std::vector<std::string> ids = {});

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> data() const noexcept { return data_; }
    const std::vector<std::string>& ids() const noexcept { return ids_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
    std::vector<std::string> ids_;
};

inline constexpr double kProbabilityRowTolerance = 1e-6;

}  // namespace genbench::metrics
