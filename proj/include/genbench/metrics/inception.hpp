#pragma once

#include <cstddef>

#include "genbench/metrics/matrix.hpp"

namespace genbench::metrics {

struct InceptionScore {
    double mean = 0.0;
    double std = 0.0;  ///< population std across splits
};

inline constexpr std::size_t kDefaultSplits = 10;
inline constexpr double kLogFloor = 1e-12;

/// exp(E_x KL(p(y|x) || p̂(y))) per split, where p̂ is the split's column mean.
/// Rows are cut into contiguous splits; the remainder rows go one each to the
/// earliest splits. Fewer rows than splits collapses to a single split.
InceptionScore inception_score(const ProbabilityMatrix& probs, std::size_t splits = kDefaultSplits);

}  // namespace genbench::metrics
