#include "genbench/metrics/frechet.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "genbench/util/error.hpp"

namespace genbench::metrics {
namespace {

Eigen::VectorXd checked_eigenvalues(Eigen::VectorXd values, const char* what) {
    if (values.size() == 0) {
        return values;
    }
    const double largest = values.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values(i) < -kNotPsdThreshold * largest) {
            throw NotPsdError(fmt::format("{}: eigenvalue {:g} is negative beyond tolerance (largest {:g})", what,
                                          values(i), largest));
        }
        if (values(i) < 0.0) {
            values(i) = 0.0;
        }
    }
    return values;
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> decompose(const Eigen::MatrixXd& a, bool vectors) {
    const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, vectors ? Eigen::ComputeEigenvectors
                                                                       : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw RuntimeFailure("eigendecomposition did not converge");
    }
    return solver;
}

void check_symmetric(const Eigen::MatrixXd& m, const char* what) {
    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
        throw InvalidInput(fmt::format("{}: covariance is not symmetric", what));
    }
}

}  // namespace

Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("sqrtm: matrix is not square");
    }
    const auto solver = decompose(a, true);
    const Eigen::VectorXd roots = checked_eigenvalues(solver.eigenvalues(), "sqrtm").cwiseSqrt();
    return solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().transpose();
}

double trace_sqrt_product(const Eigen::MatrixXd& cov_a, const Eigen::MatrixXd& cov_b) {
    if (cov_a.rows() != cov_b.rows() || cov_a.cols() != cov_b.cols()) {
        throw DimensionMismatch("trace_sqrt_product: shape mismatch");
    }
    // Σb has to be PSD too; the product test alone would miss an indefinite Σb
    // hidden in the null space of Σa.
    checked_eigenvalues(decompose(cov_b, false).eigenvalues(), "covariance b");
    const Eigen::MatrixXd root_a = sqrtm_psd(cov_a);
    const Eigen::MatrixXd product = root_a * cov_b * root_a;
    const Eigen::VectorXd values = checked_eigenvalues(decompose(product, false).eigenvalues(), "covariance product");
    return values.cwiseSqrt().sum();
}

double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
    if (a.mean.size() != b.mean.size()) {
        throw DimensionMismatch(fmt::format("frechet: dimension {} vs {}", a.mean.size(), b.mean.size()));
    }
    if (a.cov.rows() != a.mean.size() || b.cov.rows() != b.mean.size() || a.cov.cols() != a.cov.rows() ||
        b.cov.cols() != b.cov.rows()) {
        throw DimensionMismatch("frechet: covariance shape does not match mean");
    }
    check_symmetric(a.cov, "frechet (a)");
    check_symmetric(b.cov, "frechet (b)");
    // identical distributions: exactly zero
    if (a.mean == b.mean && a.cov == b.cov) {
        checked_eigenvalues(decompose(a.cov, false).eigenvalues(), "covariance a");
        return 0.0;
    }
    const double mean_term = (a.mean - b.mean).squaredNorm();
    const double trace_term = a.cov.trace() + b.cov.trace() - 2.0 * trace_sqrt_product(a.cov, b.cov);
    return std::max(0.0, mean_term + trace_term);
}

}  // namespace genbench::metrics
