#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "genbench/metrics/matrix.hpp"

namespace genbench::relaionet {

inline constexpr std::size_t kEmbedBatchSize = 2048;

/// Text encoder used to score captions against synset prompts.
class TextEmbedder {
public:
    virtual ~TextEmbedder() = default;
    /// One row per text, in order.
    virtual metrics::FeatureMatrix embed(const std::vector<std::string>& texts) const = 0;
};

/// Runs `command <request.json>` where the request is
///   {schema_version:1, kind:"text", texts:[...], output_dir}
/// and expects a feature store with one row per text in output_dir.
class ProcessTextEmbedder final : public TextEmbedder {
public:
    ProcessTextEmbedder(std::vector<std::string> command, std::filesystem::path work_dir);
    metrics::FeatureMatrix embed(const std::vector<std::string>& texts) const override;

private:
    std::vector<std::string> command_;
    std::filesystem::path work_dir_;
    mutable std::atomic<unsigned long> counter_{0};
};

}  // namespace genbench::relaionet
