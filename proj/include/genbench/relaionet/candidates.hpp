#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace genbench::relaionet {

inline constexpr double kDefaultThreshold = 0.82;
inline constexpr std::size_t kDefaultClassCap = 70;
/// wnid value for captions matching two or more synsets.
inline constexpr const char* kMultiSentinel = "MULTI";

struct CandidateRecord {
    std::string caption;
    std::string url;
    std::string wnid;  ///< "" for no match, kMultiSentinel for several
    double clip_sim = 0.0;
    bool nsfw = false;
    std::size_t shard_id = 0;
    std::size_t row_id = 0;
};

/// Rank order: clip_sim descending, then url, then (shard_id, row_id) ascending.
bool ranks_before(const CandidateRecord& a, const CandidateRecord& b);

/// Keeps records with clip_sim > tau (strict), not NSFW and matched to exactly one synset.
bool passes_filter(const CandidateRecord& r, double tau);
std::vector<CandidateRecord> filter_candidates(const std::vector<CandidateRecord>& records,
                                               double tau = kDefaultThreshold);

struct ClassManifest {
    std::string wnid;
    std::size_t cap = kDefaultClassCap;
    std::vector<CandidateRecord> candidates;  ///< rank order, unique urls, size <= cap
};

/// Deduplicates urls (keeping the better-ranked record), sorts, truncates to K.
ClassManifest rank_and_cap(const std::string& wnid, std::vector<CandidateRecord> records,
                           std::size_t cap = kDefaultClassCap);

/// Incremental rank_and_cap holding at most `cap` records. Offering records in
/// any order, or merging collectors built on disjoint parts of a stream, gives
/// the same manifest as rank_and_cap over everything offered.
class TopKCollector {
public:
    explicit TopKCollector(std::string wnid, std::size_t cap = kDefaultClassCap);

    void offer(const CandidateRecord& r);
    void merge(const TopKCollector& other);
    /// Number of records offered, duplicates included.
    std::size_t offered() const noexcept { return offered_; }
    std::size_t size() const noexcept { return ranked_.size(); }
    ClassManifest finish() const;

private:
    struct Order {
        bool operator()(const CandidateRecord& a, const CandidateRecord& b) const { return ranks_before(a, b); }
    };
    using Ranked = std::set<CandidateRecord, Order>;

    std::string wnid_;
    std::size_t cap_;
    std::size_t offered_ = 0;
    Ranked ranked_;
    std::unordered_map<std::string, Ranked::iterator> by_url_;
};

nlohmann::json to_json(const ClassManifest& m);
ClassManifest class_manifest_from_json(const nlohmann::json& j);

}  // namespace genbench::relaionet
