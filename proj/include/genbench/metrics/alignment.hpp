#pragma once

#include <span>
#include <vector>

#include "genbench/metrics/matrix.hpp"

namespace genbench::metrics {

inline constexpr double kClipScale = 100.0;
inline constexpr double kDefaultLogitScale = 100.0;

/// cos(image_i, text_i) for every paired row. Rows are L2-normalized internally;
/// zero-norm rows and row/column mismatches are rejected.
std::vector<double> paired_cosines(const FeatureMatrix& image_embs, const FeatureMatrix& text_embs);

/// Mean over pairs of 100 * max(0, cos).
double clip_score(const FeatureMatrix& image_embs, const FeatureMatrix& text_embs);
double clip_score_from_cosines(std::span<const double> cosines);

/// Mean over pairs of logit_scale * cos (not clamped).
double pick_score(const FeatureMatrix& image_embs, const FeatureMatrix& text_embs,
                  double logit_scale = kDefaultLogitScale);

/// Pass-through mode: arithmetic mean of precomputed per-image preference scores.
double pick_score_precomputed(std::span<const double> scores);

}  // namespace genbench::metrics
