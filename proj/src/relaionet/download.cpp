#include "genbench/relaionet/download.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"
#include "genbench/util/hash.hpp"
#include "genbench/util/workers.hpp"

namespace genbench::relaionet {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\"");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\"");
    return s.substr(b, e - b + 1);
}

struct UrlParts {
    std::string origin;  ///< scheme://host[:port]
    std::string host;
    std::string path;    ///< includes query
};

UrlParts split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw InvalidInput(fmt::format("not an absolute url: {}", url));
    }
    const auto path_start = url.find('/', scheme_end + 3);
    UrlParts p;
    p.origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    p.path = path_start == std::string::npos ? "/" : url.substr(path_start);
    p.host = p.origin.substr(scheme_end + 3);
    return p;
}

std::string extension_for(const std::string& url) {
    auto path = url;
    if (const auto q = path.find_first_of("?#"); q != std::string::npos) path.resize(q);
    const auto slash = path.rfind('/');
    const auto dot = path.rfind('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
        auto ext = path.substr(dot);
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        static const std::set<std::string> known{".jpg", ".jpeg", ".png", ".webp", ".gif", ".bmp"};
        if (known.contains(ext)) return ext;
    }
    return ".jpg";
}

/// Enforces a minimum interval between requests to the same host.
class HostThrottle {
public:
    explicit HostThrottle(std::chrono::milliseconds interval) : interval_(interval) {}

    void wait(const std::string& host) {
        if (interval_.count() <= 0) return;
        Clock::time_point slot;
        {
            std::lock_guard lock(mutex_);
            auto& next = next_[host];
            const auto now = Clock::now();
            slot = std::max(now, next);
            next = slot + interval_;
        }
        std::this_thread::sleep_until(slot);
    }

private:
    std::chrono::milliseconds interval_;
    std::mutex mutex_;
    std::map<std::string, Clock::time_point> next_;
};

struct Task {
    std::size_t class_pos;
    std::size_t cand_pos;
    std::string id;
    std::string url;
    fs::path rel_file;
};

enum class TaskState { Pending, Fetched, Reused, Dead };

struct TaskResult {
    TaskState state = TaskState::Pending;
    std::string sha256;
    std::size_t attempts = 0;
    std::string error;
};

}  // namespace

ExclusionReason parse_exclusion_reason(const std::string& code) {
    if (code == "synset-mismatch") return ExclusionReason::SynsetMismatch;
    if (code == "ilsvrc-mismatch") return ExclusionReason::IlsvrcMismatch;
    if (code == "text-dominant") return ExclusionReason::TextDominant;
    if (code == "insensitive") return ExclusionReason::Insensitive;
    if (code == "nsfw") return ExclusionReason::Nsfw;
    throw InvalidInput(fmt::format("unknown exclusion reason code '{}'", code));
}

std::string exclusion_code(ExclusionReason r) {
    switch (r) {
        case ExclusionReason::SynsetMismatch: return "synset-mismatch";
        case ExclusionReason::IlsvrcMismatch: return "ilsvrc-mismatch";
        case ExclusionReason::TextDominant: return "text-dominant";
        case ExclusionReason::Insensitive: return "insensitive";
        case ExclusionReason::Nsfw: return "nsfw";
    }
    return {};
}

std::string exclusion_label(ExclusionReason r) {
    switch (r) {
        case ExclusionReason::SynsetMismatch: return "Synset ID mismatch";
        case ExclusionReason::IlsvrcMismatch: return "ILSVRC-2012 ID mismatch";
        case ExclusionReason::TextDominant: return "Text-dominant imagery";
        case ExclusionReason::Insensitive: return "Insensitive or joke content";
        case ExclusionReason::Nsfw: return "NSFW content";
    }
    return {};
}

ExclusionList load_exclusions(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(fmt::format("cannot open exclusion list {}", path.string()));
    }
    ExclusionList out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw InvalidInput(fmt::format("{}:{}: expected image_id,reason_code", path.string(), lineno));
        }
        const auto id = trim(line.substr(0, comma));
        const auto code = trim(line.substr(comma + 1));
        if (lineno == 1 && id == "image_id") continue;
        const auto reason = parse_exclusion_reason(code);
        const auto [it, inserted] = out.emplace(id, reason);
        if (!inserted && it->second != reason) {
            throw InvalidInput(fmt::format("{}:{}: image {} listed with two reasons", path.string(), lineno, id));
        }
    }
    return out;
}

void merge_exclusions(ExclusionList& into, const ExclusionList& more) {
    for (const auto& [id, reason] : more) {
        const auto [it, inserted] = into.emplace(id, reason);
        if (!inserted && it->second != reason) {
            throw InvalidInput(fmt::format("image {} listed with two exclusion reasons", id));
        }
    }
}

std::string image_id(const std::string& wnid, const std::string& url) {
    return wnid + "_" + util::sha256_hex(url).substr(0, 12);
}

FetchResult HttpFetcher::fetch(const std::string& url) const {
    FetchResult out;
    try {
        const auto parts = split_url(url);
        httplib::Client client(parts.origin);
        client.set_follow_location(true);
        client.set_connection_timeout(timeout_);
        client.set_read_timeout(timeout_);
        auto res = client.Get(parts.path);
        if (!res) {
            out.error = httplib::to_string(res.error());
            return out;
        }
        out.status = res->status;
        if (res->status == 200) {
            out.body = std::move(res->body);
        }
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

std::string manifest_digest(const nlohmann::json& manifest) {
    auto copy = manifest;
    copy.erase("digest");
    return util::sha256_hex(copy.dump());
}

DownloadOutcome download_and_finalize(const std::vector<ClassManifest>& classes, const ExclusionList& exclusions,
                                      const DownloadOptions& options) {
    if (options.attempts == 0) {
        throw ConfigError("download attempts must be at least 1");
    }
    const auto fetcher = options.fetcher ? options.fetcher : std::make_shared<HttpFetcher>();
    std::map<ExclusionReason, std::size_t> excluded_counts;
    std::set<std::string> seen_ids;
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const auto& cls = classes[c];
        for (std::size_t k = 0; k < cls.candidates.size(); ++k) {
            const auto& cand = cls.candidates[k];
            auto id = image_id(cls.wnid, cand.url);
            seen_ids.insert(id);
            if (const auto it = exclusions.find(id); it != exclusions.end()) {
                ++excluded_counts[it->second];
                continue;
            }
            auto rel = fs::path("images") / cls.wnid / (id + extension_for(cand.url));
            tasks.push_back({c, k, std::move(id), cand.url, std::move(rel)});
        }
    }
    std::size_t unknown_exclusions = 0;
    for (const auto& [id, reason] : exclusions) {
        unknown_exclusions += seen_ids.contains(id) ? 0 : 1;
    }

    HostThrottle throttle(options.per_host_interval);
    std::vector<TaskResult> results(tasks.size());
    util::parallel_for(tasks.size(), std::max<std::size_t>(1, options.workers), [&](std::size_t i) {
        const auto& task = tasks[i];
        auto& res = results[i];
        const auto file = options.root / task.rel_file;
        if (fs::is_regular_file(file) && fs::file_size(file) > 0) {
            res.state = TaskState::Reused;
            res.sha256 = util::sha256_file(file);
            return;
        }
        std::string host;
        try {
            host = split_url(task.url).host;
        } catch (const Error& e) {
            res.state = TaskState::Dead;
            res.error = e.what();
            return;
        }
        auto delay = options.backoff_base;
        for (std::size_t attempt = 1; attempt <= options.attempts; ++attempt) {
            throttle.wait(host);
            const auto got = fetcher->fetch(task.url);
            res.attempts = attempt;
            if (got.ok() && !got.body.empty()) {
                util::write_atomic(file, got.body);
                res.state = TaskState::Fetched;
                res.sha256 = util::sha256_hex(got.body);
                return;
            }
            res.error = got.status ? fmt::format("HTTP {}", got.status) : got.error;
            if (got.ok() || !got.retryable()) {
                if (got.ok()) res.error = "empty body";
                break;
            }
            if (attempt < options.attempts) {
                std::this_thread::sleep_for(delay);
                delay *= 2;
            }
        }
        res.state = TaskState::Dead;
    });

    DownloadOutcome outcome;
    auto classes_json = nlohmann::json::array();
    auto per_class = nlohmann::json::object();
    auto dead_json = nlohmann::json::array();
    auto warnings = nlohmann::json::array();
    auto dropped = nlohmann::json::array();
    std::size_t total_images = 0;
    std::size_t next = 0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const auto& cls = classes[c];
        auto images = nlohmann::json::array();
        std::size_t class_dead = 0;
        for (; next < tasks.size() && tasks[next].class_pos == c; ++next) {
            const auto& task = tasks[next];
            const auto& res = results[next];
            if (res.state == TaskState::Dead) {
                ++outcome.dead;
                ++class_dead;
                dead_json.push_back({{"id", task.id}, {"url", task.url}, {"attempts", res.attempts}, {"error", res.error}});
                continue;
            }
            if (res.state == TaskState::Fetched) ++outcome.fetched;
            if (res.state == TaskState::Reused) ++outcome.reused;
            images.push_back({{"id", task.id},
                              {"url", task.url},
                              {"file", task.rel_file.generic_string()},
                              {"clip_sim", cls.candidates[task.cand_pos].clip_sim},
                              {"sha256", res.sha256}});
        }
        if (images.empty()) {
            const auto why = class_dead > 0 ? "all candidate URLs are dead" : "no images left after exclusions";
            warnings.push_back(fmt::format("class {} dropped: {}", cls.wnid, why));
            dropped.push_back({{"wnid", cls.wnid}, {"reason", why}});
            continue;
        }
        per_class[cls.wnid] = images.size();
        total_images += images.size();
        classes_json.push_back({{"wnid", cls.wnid}, {"images", std::move(images)}});
    }

    outcome.manifest = {{"schema_version", 1},
                        {"classes", classes_json},
                        {"counts", {{"classes", classes_json.size()}, {"images", total_images}, {"per_class", per_class}}}};
    outcome.manifest["digest"] = manifest_digest(outcome.manifest);

    auto by_label = nlohmann::json::object();
    for (auto r : {ExclusionReason::SynsetMismatch, ExclusionReason::IlsvrcMismatch, ExclusionReason::TextDominant,
                   ExclusionReason::Insensitive, ExclusionReason::Nsfw}) {
        by_label[exclusion_label(r)] = excluded_counts.contains(r) ? excluded_counts.at(r) : 0;
    }
    outcome.report = {{"exclusions", {{"by_criterion", by_label}, {"unknown_ids", unknown_exclusions}}},
                      {"downloads",
                       {{"tasks", tasks.size()},
                        {"fetched", outcome.fetched},
                        {"reused", outcome.reused},
                        {"dead", outcome.dead},
                        {"dead_urls", dead_json}}},
                      {"dropped_classes", dropped},
                      {"warnings", warnings}};
    return outcome;
}

}  // namespace genbench::relaionet
