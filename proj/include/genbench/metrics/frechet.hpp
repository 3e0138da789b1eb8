#pragma once

#include <Eigen/Dense>

#include "genbench/metrics/gaussian.hpp"

namespace genbench::metrics {

/// Eigenvalue policy for PSD kernels: negatives are clamped to zero; anything
/// below -1e-6 x (largest eigenvalue magnitude) is reported as not PSD.
inline constexpr double kNegativeEigenClamp = 1e-10;
inline constexpr double kNotPsdThreshold = 1e-6;

/// Principal square root of a symmetric positive semi-definite matrix via its
/// eigendecomposition. The input is symmetrized before decomposition.
Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& a);

/// Tr((Σa Σb)^{1/2}) computed as the trace of the root of the symmetric
/// product Σa^{1/2} Σb Σa^{1/2}.
double trace_sqrt_product(const Eigen::MatrixXd& cov_a, const Eigen::MatrixXd& cov_b);

/// Squared Fréchet distance between two Gaussians:
/// ||μa - μb||² + Tr(Σa) + Tr(Σb) - 2 Tr((Σa Σb)^{1/2}), floored at 0.
double frechet_distance(const GaussianStats& a, const GaussianStats& b);

}  // namespace genbench::metrics
