#include "genbench/relaionet/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

#include "genbench/util/error.hpp"

namespace genbench::relaionet {

bool ranks_before(const CandidateRecord& a, const CandidateRecord& b) {
    if (a.clip_sim != b.clip_sim) {
        return a.clip_sim > b.clip_sim;
    }
    return std::tie(a.url, a.shard_id, a.row_id) < std::tie(b.url, b.shard_id, b.row_id);
}

bool passes_filter(const CandidateRecord& r, double tau) {
    return std::isfinite(r.clip_sim) && r.clip_sim > tau && !r.nsfw && !r.wnid.empty() && r.wnid != kMultiSentinel;
}

std::vector<CandidateRecord> filter_candidates(const std::vector<CandidateRecord>& records, double tau) {
    std::vector<CandidateRecord> out;
    for (const auto& r : records) {
        if (passes_filter(r, tau)) {
            out.push_back(r);
        }
    }
    return out;
}

ClassManifest rank_and_cap(const std::string& wnid, std::vector<CandidateRecord> records, std::size_t cap) {
    for (const auto& r : records) {
        if (r.wnid != wnid) {
            throw InvalidInput(fmt::format("rank_and_cap({}): record for {} ({})", wnid, r.wnid, r.url));
        }
    }
    std::sort(records.begin(), records.end(), ranks_before);
    ClassManifest m{wnid, cap, {}};
    std::set<std::string> seen;
    for (auto& r : records) {
        if (m.candidates.size() == cap) {
            break;
        }
        if (seen.insert(r.url).second) {
            m.candidates.push_back(std::move(r));
        }
    }
    return m;
}

TopKCollector::TopKCollector(std::string wnid, std::size_t cap) : wnid_(std::move(wnid)), cap_(cap) {}

void TopKCollector::offer(const CandidateRecord& r) {
    ++offered_;
    if (cap_ == 0) {
        return;
    }
    if (const auto it = by_url_.find(r.url); it != by_url_.end()) {
        if (!ranks_before(r, *it->second)) {
            return;
        }
        ranked_.erase(it->second);
        by_url_.erase(it);
    } else if (ranked_.size() == cap_ && !ranks_before(r, *std::prev(ranked_.end()))) {
        return;
    }
    const auto pos = ranked_.insert(r).first;
    by_url_.emplace(r.url, pos);
    if (ranked_.size() > cap_) {
        const auto last = std::prev(ranked_.end());
        by_url_.erase(last->url);
        ranked_.erase(last);
    }
}

void TopKCollector::merge(const TopKCollector& other) {
    const auto before = offered_;
    for (const auto& r : other.ranked_) {
        offer(r);
    }
    offered_ = before + other.offered_;
}

ClassManifest TopKCollector::finish() const {
    return {wnid_, cap_, std::vector<CandidateRecord>(ranked_.begin(), ranked_.end())};
}

nlohmann::json to_json(const ClassManifest& m) {
    auto arr = nlohmann::json::array();
    for (const auto& r : m.candidates) {
        arr.push_back({{"url", r.url},
                       {"caption", r.caption},
                       {"clip_sim", r.clip_sim},
                       {"shard_id", r.shard_id},
                       {"row_id", r.row_id}});
    }
    return {{"wnid", m.wnid}, {"cap", m.cap}, {"candidates", arr}};
}

ClassManifest class_manifest_from_json(const nlohmann::json& j) {
    try {
        ClassManifest m;
        m.wnid = j.at("wnid").get<std::string>();
        m.cap = j.value("cap", kDefaultClassCap);
        for (const auto& c : j.at("candidates")) {
            CandidateRecord r;
            r.wnid = m.wnid;
            r.url = c.at("url").get<std::string>();
            r.caption = c.value("caption", std::string());
            r.clip_sim = c.at("clip_sim").get<double>();
            r.shard_id = c.value("shard_id", std::size_t{0});
            r.row_id = c.value("row_id", std::size_t{0});
            m.candidates.push_back(std::move(r));
        }
        if (m.candidates.size() > m.cap) {
            throw InvalidInput(fmt::format("class {}: {} candidates exceed cap {}", m.wnid, m.candidates.size(), m.cap));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("class manifest: {}", e.what()));
    }
}

}  // namespace genbench::relaionet
