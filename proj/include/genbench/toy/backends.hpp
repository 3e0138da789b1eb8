#pragma once

// Stand-in metric backends for toy images, so the whole pipeline runs without
// any neural network:
//   features     decoded (x, y) point, d = 2
//   classifier   exact Bayes posterior p(c | x) under the class mixture
//   alignment    image embedding sqrt(p(. | x)), text embedding one-hot(class);
//                their cosine is sqrt(p(class | x))

#include "genbench/harness/backends.hpp"
#include "genbench/toy/flow.hpp"

namespace genbench::toy {

/// Posterior over the config's classes (column order = config order).
std::vector<double> class_posterior(const ToyConfig& config, const Vec2& x);

class ToyFeatureBackend final : public harness::FeatureBackend {
public:
    std::string id() const override { return "toy"; }
    metrics::FeatureMatrix features(std::span<const harness::ImageItem> items) const override;
};

class ToyClassifierBackend final : public harness::ClassifierBackend {
public:
    explicit ToyClassifierBackend(const ToyConfig& config) : config_(config) {}
    std::string id() const override { return "toy"; }
    metrics::ProbabilityMatrix probabilities(std::span<const harness::ImageItem> items) const override;

private:
    const ToyConfig& config_;
};

class ToyAlignmentBackend final : public harness::AlignmentBackend {
public:
    explicit ToyAlignmentBackend(const ToyConfig& config) : config_(config) {}
    std::string id() const override { return "toy"; }
    harness::PairedEmbeddings embed(std::span<const harness::ImageItem> items) const override;
    void check_coverage(std::span<const harness::ImageItem> items) const override;

private:
    const ToyConfig& config_;
};

/// Owns the config and the three backends that reference it.
class ToyBackends {
public:
    explicit ToyBackends(ToyConfig config)
        : config_(std::move(config)), classifier_(config_), alignment_(config_) {}
    ToyBackends(const ToyBackends&) = delete;
    ToyBackends& operator=(const ToyBackends&) = delete;

    const ToyConfig& config() const noexcept { return config_; }
    const ToyFeatureBackend& feature() const noexcept { return feature_; }
    const ToyClassifierBackend& classifier() const noexcept { return classifier_; }
    const ToyAlignmentBackend& alignment() const noexcept { return alignment_; }

private:
    ToyConfig config_;
    ToyFeatureBackend feature_;
    ToyClassifierBackend classifier_;
    ToyAlignmentBackend alignment_;
};

}  // namespace genbench::toy
