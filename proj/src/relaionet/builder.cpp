#include "genbench/relaionet/builder.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "genbench/relaionet/shard.hpp"
#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"
#include "genbench/util/workers.hpp"

namespace genbench::relaionet {
namespace {

namespace fs = std::filesystem;

using Collectors = std::map<std::string, TopKCollector>;

double cosine(std::span<const double> a, std::span<const double> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return dot / std::sqrt(na * nb);
}

class ShardProcessor {
public:
    ShardProcessor(const LemmaIndex& index, const BuildOptions& options,
                   const std::map<std::string, std::vector<double>>* prompt_embeddings)
        : index_(index), options_(options), prompts_(prompt_embeddings) {}

    void run(std::size_t shard_id, const fs::path& path, ShardSummary& summary) {
        summary.shard_id = shard_id;
        summary.path = path.string();
        try {
            ShardReader reader(path);
            if (!reader.has_similarity() && !options_.embedder) {
                throw IoError("shard has no similarity column and no text embedder is configured");
            }
            ShardRow row;
            while (reader.next(row)) {
                const auto match = match_caption(row.caption, index_);
                if (match.kind == MatchKind::None) {
                    ++summary.unmatched;
                    continue;
                }
                if (match.kind == MatchKind::Multi) {
                    ++summary.multi;
                    continue;
                }
                if (row.nsfw) {
                    ++summary.nsfw;
                    continue;
                }
                CandidateRecord r{std::move(row.caption), std::move(row.url), match.wnid, 0.0, false, shard_id,
                                  row.row_id};
                if (row.similarity) {
                    r.clip_sim = *row.similarity;
                    accept(std::move(r), summary);
                } else {
                    pending_.push_back(std::move(r));
                    if (pending_.size() >= options_.embed_batch) {
                        flush(summary);
                    }
                }
            }
            flush(summary);
            summary.rows = reader.rows_read();
            summary.malformed = reader.malformed();
            summary.empty_url = reader.empty_url();
        } catch (const Error& e) {
            summary.error = e.what();
        }
    }

    Collectors& collectors() { return collectors_; }

private:
    void accept(CandidateRecord r, ShardSummary& summary) {
        if (!passes_filter(r, options_.threshold)) {
            ++summary.below_threshold;
            return;
        }
        ++summary.kept;
        auto it = collectors_.find(r.wnid);
        if (it == collectors_.end()) {
            it = collectors_.emplace(r.wnid, TopKCollector(r.wnid, options_.cap)).first;
        }
        it->second.offer(r);
    }

    void flush(ShardSummary& summary) {
        if (pending_.empty()) {
            return;
        }
        std::vector<std::string> texts;
        texts.reserve(pending_.size());
        for (const auto& r : pending_) {
            texts.push_back(r.caption);
        }
        const auto emb = options_.embedder->embed(texts);
        for (std::size_t i = 0; i < pending_.size(); ++i) {
            auto& r = pending_[i];
            r.clip_sim = cosine(emb.row(i), prompts_->at(r.wnid));
            accept(std::move(r), summary);
        }
        pending_.clear();
    }

    const LemmaIndex& index_;
    const BuildOptions& options_;
    const std::map<std::string, std::vector<double>>* prompts_;
    Collectors collectors_;
    std::vector<CandidateRecord> pending_;
};

}  // namespace

nlohmann::json ShardSummary::to_json() const {
    nlohmann::json j{{"shard_id", shard_id},     {"path", path},           {"status", error ? "error" : "ok"},
                     {"rows", rows},             {"malformed", malformed}, {"empty_url", empty_url},
                     {"unmatched", unmatched},   {"multi", multi},         {"nsfw", nsfw},
                     {"below_threshold", below_threshold}, {"kept", kept}};
    if (error) {
        j["error"] = *error;
    }
    return j;
}

CandidateBuild build_candidates(const std::vector<Synset>& synsets, const std::vector<fs::path>& shards,
                                const BuildOptions& options) {
    if (options.cap == 0) {
        throw ConfigError("per-class cap must be positive");
    }
    if (options.embed_batch == 0) {
        throw ConfigError("embedding batch size must be positive");
    }
    const auto index = build_lemma_index(synsets);

    std::map<std::string, std::vector<double>> prompt_embeddings;
    if (options.embedder) {
        std::vector<std::string> wnids;
        std::vector<std::string> prompts;
        for (const auto& s : synsets) {
            wnids.push_back(s.wnid);
            prompts.push_back(synset_prompt(s));
        }
        for (std::size_t first = 0; first < prompts.size(); first += options.embed_batch) {
            const auto last = std::min(prompts.size(), first + options.embed_batch);
            const std::vector<std::string> chunk(prompts.begin() + first, prompts.begin() + last);
            const auto emb = options.embedder->embed(chunk);
            for (std::size_t i = 0; i < chunk.size(); ++i) {
                const auto row = emb.row(i);
                prompt_embeddings[wnids[first + i]].assign(row.begin(), row.end());
            }
        }
    }

    CandidateBuild build;
    build.synsets = synsets;
    build.options = options;
    build.options.embedder = nullptr;
    build.shards.resize(shards.size());
    std::vector<Collectors> partial(shards.size());
    util::parallel_for(shards.size(), std::max<std::size_t>(1, options.workers), [&](std::size_t i) {
        ShardProcessor proc(index, options, &prompt_embeddings);
        proc.run(i, shards[i], build.shards[i]);
        partial[i] = std::move(proc.collectors());
    });

    Collectors merged;
    for (auto& part : partial) {
        for (auto& [wnid, collector] : part) {
            auto it = merged.find(wnid);
            if (it == merged.end()) {
                merged.emplace(wnid, std::move(collector));
            } else {
                it->second.merge(collector);
            }
        }
        part.clear();
    }

    struct Ranked {
        std::size_t offered;
        int class_index;
        const Synset* synset;
    };
    std::vector<Ranked> order;
    for (const auto& s : synsets) {
        if (const auto it = merged.find(s.wnid); it != merged.end()) {
            order.push_back({it->second.offered(), s.class_index, &s});
        }
    }
    std::sort(order.begin(), order.end(), [](const Ranked& a, const Ranked& b) {
        return a.offered != b.offered ? a.offered > b.offered : a.class_index < b.class_index;
    });
    std::vector<const Synset*> chosen;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i < options.top_n) {
            chosen.push_back(order[i].synset);
        } else {
            build.dropped_classes.push_back(order[i].synset->wnid);
        }
    }
    std::sort(chosen.begin(), chosen.end(), [](const Synset* a, const Synset* b) { return a->class_index < b->class_index; });
    std::sort(build.dropped_classes.begin(), build.dropped_classes.end());
    for (const auto* s : chosen) {
        build.classes.push_back(merged.at(s->wnid).finish());
    }
    return build;
}

nlohmann::json CandidateBuild::candidates_json() const {
    std::map<std::string, const Synset*> by_wnid;
    for (const auto& s : synsets) {
        by_wnid.emplace(s.wnid, &s);
    }
    auto classes_json = nlohmann::json::array();
    for (const auto& m : classes) {
        auto j = to_json(m);
        const auto* s = by_wnid.at(m.wnid);
        j["class_index"] = s->class_index;
        j["name"] = s->name;
        classes_json.push_back(std::move(j));
    }
    return {{"schema_version", 1},
            {"threshold", options.threshold},
            {"cap", options.cap},
            {"top_n", options.top_n},
            {"classes", classes_json}};
}

nlohmann::json CandidateBuild::report_json() const {
    auto shard_json = nlohmann::json::array();
    ShardSummary total;
    std::size_t failed = 0;
    for (const auto& s : shards) {
        shard_json.push_back(s.to_json());
        total.rows += s.rows;
        total.malformed += s.malformed;
        total.empty_url += s.empty_url;
        total.unmatched += s.unmatched;
        total.multi += s.multi;
        total.nsfw += s.nsfw;
        total.below_threshold += s.below_threshold;
        total.kept += s.kept;
        failed += s.error ? 1 : 0;
    }
    std::size_t selected = 0;
    for (const auto& c : classes) {
        selected += c.candidates.size();
    }
    return {{"schema_version", 1},
            {"shards", shard_json},
            {"totals",
             {{"shards", shards.size()},
              {"failed_shards", failed},
              {"rows", total.rows},
              {"malformed", total.malformed},
              {"empty_url", total.empty_url},
              {"unmatched", total.unmatched},
              {"multi", total.multi},
              {"nsfw", total.nsfw},
              {"below_threshold", total.below_threshold},
              {"kept", total.kept},
              {"classes", classes.size()},
              {"selected", selected}}},
            {"dropped_classes", dropped_classes}};
}

std::vector<ClassManifest> load_candidates(const fs::path& path) {
    const auto j = util::read_json(path);
    std::vector<ClassManifest> out;
    try {
        for (const auto& c : j.at("classes")) {
            out.push_back(class_manifest_from_json(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("{}: {}", path.string(), e.what()));
    }
    return out;
}

}  // namespace genbench::relaionet
