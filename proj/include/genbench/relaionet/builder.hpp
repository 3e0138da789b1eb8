#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "genbench/relaionet/candidates.hpp"
#include "genbench/relaionet/embedder.hpp"
#include "genbench/relaionet/synset.hpp"

namespace genbench::relaionet {

struct BuildOptions {
    double threshold = kDefaultThreshold;
    std::size_t cap = kDefaultClassCap;
    /// Keep the N classes with the most surviving candidates (ties by class_index).
    std::size_t top_n = 1000;
    std::size_t workers = 1;
    /// Scores captions when a shard has no similarity column.
    std::shared_ptr<const TextEmbedder> embedder;
    std::size_t embed_batch = kEmbedBatchSize;
};

struct ShardSummary {
    std::size_t shard_id = 0;
    std::string path;
    std::optional<std::string> error;
    std::size_t rows = 0;
    std::size_t malformed = 0;
    std::size_t empty_url = 0;
    std::size_t unmatched = 0;
    std::size_t multi = 0;
    std::size_t nsfw = 0;
    std::size_t below_threshold = 0;
    std::size_t kept = 0;

    nlohmann::json to_json() const;
};

struct CandidateBuild {
    std::vector<Synset> synsets;
    std::vector<ClassManifest> classes;  ///< selected classes, by class_index
    std::vector<ShardSummary> shards;
    std::vector<std::string> dropped_classes;  ///< matched but outside top_n
    BuildOptions options;

    nlohmann::json candidates_json() const;
    nlohmann::json report_json() const;
};

/// Streams every shard once: match captions, filter, keep a per-class top-K.
/// Memory is bounded by workers x classes x cap records plus one embedding batch.
/// An unreadable shard is recorded in its summary and the build continues.
CandidateBuild build_candidates(const std::vector<Synset>& synsets, const std::vector<std::filesystem::path>& shards,
                                const BuildOptions& options = {});

inline constexpr const char* kCandidatesFile = "candidates.json";
inline constexpr const char* kBuildReportFile = "build_report.json";

/// Reads candidates.json back into class manifests.
std::vector<ClassManifest> load_candidates(const std::filesystem::path& path);

}  // namespace genbench::relaionet
