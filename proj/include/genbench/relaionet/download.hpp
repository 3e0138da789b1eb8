#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "genbench/relaionet/candidates.hpp"

namespace genbench::relaionet {

enum class ExclusionReason { SynsetMismatch, IlsvrcMismatch, TextDominant, Insensitive, Nsfw };

/// "synset-mismatch", "ilsvrc-mismatch", "text-dominant", "insensitive", "nsfw".
ExclusionReason parse_exclusion_reason(const std::string& code);
std::string exclusion_code(ExclusionReason r);
/// Report label, e.g. "NSFW content".
std::string exclusion_label(ExclusionReason r);

using ExclusionList = std::map<std::string, ExclusionReason>;

/// exclusions.csv with header `image_id,reason_code`. An id listed twice with
/// different reasons is an error.
ExclusionList load_exclusions(const std::filesystem::path& path);
void merge_exclusions(ExclusionList& into, const ExclusionList& more);

/// "<wnid>_<first 12 hex of sha256(url)>".
std::string image_id(const std::string& wnid, const std::string& url);

struct FetchResult {
    int status = 0;  ///< HTTP status; 0 for a transport failure
    std::string body;
    std::string error;
    bool ok() const noexcept { return status == 200; }
    /// Transport failures, 429 and 5xx are worth another attempt.
    bool retryable() const noexcept { return status == 0 || status == 429 || status >= 500; }
};

class Fetcher {
public:
    virtual ~Fetcher() = default;
    virtual FetchResult fetch(const std::string& url) const = 0;
};

/// http:// and https:// via cpp-httplib, following redirects.
class HttpFetcher final : public Fetcher {
public:
    explicit HttpFetcher(std::chrono::seconds timeout = std::chrono::seconds(30)) : timeout_(timeout) {}
    FetchResult fetch(const std::string& url) const override;

private:
    std::chrono::seconds timeout_;
};

struct DownloadOptions {
    std::filesystem::path root;  ///< dataset tree; images go to root/images/<wnid>/
    std::size_t attempts = 3;
    std::chrono::milliseconds backoff_base{250};  ///< doubles after each failed attempt
    std::size_t workers = 8;
    std::chrono::milliseconds per_host_interval{0};  ///< minimum gap between requests to one host
    std::shared_ptr<const Fetcher> fetcher;         ///< HttpFetcher when null
};

struct DownloadOutcome {
    nlohmann::json manifest;  ///< dataset_manifest.json
    nlohmann::json report;    ///< exclusion counts, download stats, dropped classes, warnings
    std::size_t fetched = 0;  ///< network downloads performed this call
    std::size_t reused = 0;   ///< files already present
    std::size_t dead = 0;
};

/// Applies exclusions, downloads the remaining candidates with retry and
/// backoff, and assembles the dataset manifest in class order. Existing files
/// are not fetched again. Classes left without images are dropped with a warning.
DownloadOutcome download_and_finalize(const std::vector<ClassManifest>& classes, const ExclusionList& exclusions,
                                      const DownloadOptions& options);

/// SHA-256 of the manifest's canonical serialization without the digest field.
std::string manifest_digest(const nlohmann::json& manifest);

inline constexpr const char* kDatasetManifestFile = "dataset_manifest.json";

}  // namespace genbench::relaionet
