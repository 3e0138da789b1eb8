#include "genbench/metrics/alignment.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "genbench/util/error.hpp"

namespace genbench::metrics {
namespace {

double mean_of(std::span<const double> values) {
    if (values.empty()) {
        throw InvalidInput("mean of an empty score list");
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

}  // namespace

std::vector<double> paired_cosines(const FeatureMatrix& image_embs, const FeatureMatrix& text_embs) {
    if (image_embs.rows() != text_embs.rows()) {
        throw DimensionMismatch(
            fmt::format("alignment: {} image rows vs {} text rows", image_embs.rows(), text_embs.rows()));
    }
    if (image_embs.cols() != text_embs.cols()) {
        throw DimensionMismatch(
            fmt::format("alignment: embedding width {} vs {}", image_embs.cols(), text_embs.cols()));
    }
    std::vector<double> out;
    out.reserve(image_embs.rows());
    for (std::size_t i = 0; i < image_embs.rows(); ++i) {
        const auto a = image_embs.row(i);
        const auto b = text_embs.row(i);
        double dot = 0.0;
        double na = 0.0;
        double nb = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            dot += a[k] * b[k];
            na += a[k] * a[k];
            nb += b[k] * b[k];
        }
        if (na == 0.0 || nb == 0.0) {
            throw InvalidInput(fmt::format("alignment: zero-norm embedding in row {}", i));
        }
        out.push_back(std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0));
    }
    return out;
}

double clip_score_from_cosines(std::span<const double> cosines) {
    std::vector<double> scaled;
    scaled.reserve(cosines.size());
    for (double c : cosines) {
        scaled.push_back(kClipScale * std::max(0.0, c));
    }
    return mean_of(scaled);
}

double clip_score(const FeatureMatrix& image_embs, const FeatureMatrix& text_embs) {
    return clip_score_from_cosines(paired_cosines(image_embs, text_embs));
}

double pick_score(const FeatureMatrix& image_embs, const FeatureMatrix& text_embs, double logit_scale) {
    if (!(logit_scale > 0.0) || !std::isfinite(logit_scale)) {
        throw InvalidInput("pick score: logit_scale must be positive");
    }
    auto cosines = paired_cosines(image_embs, text_embs);
    for (auto& c : cosines) {
        c *= logit_scale;
    }
    return mean_of(cosines);
}

double pick_score_precomputed(std::span<const double> scores) {
    for (double s : scores) {
        if (!std::isfinite(s)) {
            throw InvalidInput("pick score: non-finite precomputed score");
        }
    }
    return mean_of(scores);
}

}  // namespace genbench::metrics
