#include "genbench/harness/backends.hpp"

#include <unistd.h>

#include <fmt/format.h>

#include "genbench/metrics/alignment.hpp"
#include "genbench/metrics/feature_store.hpp"
#include "genbench/toy/backends.hpp"
#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"
#include "genbench/util/hash.hpp"
#include "genbench/util/process.hpp"

namespace genbench::harness {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> item_ids(std::span<const ImageItem> items) {
    std::vector<std::string> ids;
    ids.reserve(items.size());
    for (const auto& item : items) {
        ids.push_back(item.id);
    }
    return ids;
}

std::string list_ids(const std::vector<std::string>& ids, std::size_t limit = 20) {
    std::string out;
    for (std::size_t i = 0; i < ids.size() && i < limit; ++i) {
        out += (i ? ", " : "") + ids[i];
    }
    if (ids.size() > limit) {
        out += fmt::format(", ... ({} total)", ids.size());
    }
    return out;
}

void require_covered(const std::string& backend, const StoreTable& table, std::span<const ImageItem> items) {
    const auto missing = table.missing(items);
    if (!missing.empty()) {
        throw CoverageError(fmt::format("backend '{}' has no rows for {} image id(s): {}", backend, missing.size(),
                                        list_ids(missing)));
    }
}

/// Reorders a store's rows to match `items` by id.
std::vector<double> rows_in_item_order(const fs::path& dir, std::span<const ImageItem> items) {
    StoreTable table(dir);
    return table.gather(items);
}

std::vector<std::string> command_from_json(const nlohmann::json& j, const char* what) {
    if (!j.contains("command") || !j.at("command").is_array() || j.at("command").empty()) {
        throw ConfigError(fmt::format("backends.{}: process backend needs a nonempty command array", what));
    }
    return j.at("command").get<std::vector<std::string>>();
}

std::string default_process_id(const std::vector<std::string>& command) {
    std::string joined;
    for (const auto& part : command) {
        joined += part;
        joined += '\0';
    }
    return "process-" + util::sha256_hex(joined).substr(0, 12);
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace

void BackendBinding::require_resolved() const {
    std::vector<std::string> missing;
    if (!feature) missing.emplace_back("feature");
    if (!classifier) missing.emplace_back("classifier");
    if (!alignment) missing.emplace_back("alignment");
    if (!preference) missing.emplace_back("preference");
    if (!missing.empty()) {
        throw ConfigError(fmt::format("backend binding incomplete: missing {}", list_ids(missing)));
    }
}

void BackendBinding::check_coverage(std::span<const ImageItem> items) const {
    require_resolved();
    feature->check_coverage(items);
    classifier->check_coverage(items);
    alignment->check_coverage(items);
    preference->check_coverage(items);
}

// --- StoreTable ---------------------------------------------------------------

StoreTable::StoreTable(const fs::path& dir) : dir_(dir) {
    metrics::FeatureStoreReader reader(dir);
    const auto& m = reader.manifest();
    cols_ = m.cols;
    data_ = reader.read_rows(0, m.rows);
    index_.reserve(m.ids.size());
    for (std::size_t i = 0; i < m.ids.size(); ++i) {
        if (!index_.emplace(m.ids[i], i).second) {
            throw InvalidInput(fmt::format("store {}: duplicate id '{}'", dir.string(), m.ids[i]));
        }
    }
}

std::vector<std::string> StoreTable::missing(std::span<const ImageItem> items) const {
    std::vector<std::string> out;
    for (const auto& item : items) {
        if (!index_.contains(item.id)) {
            out.push_back(item.id);
        }
    }
    return out;
}

std::vector<double> StoreTable::gather(std::span<const ImageItem> items) const {
    std::vector<double> out;
    out.reserve(items.size() * cols_);
    std::vector<std::string> missing_ids;
    for (const auto& item : items) {
        const auto it = index_.find(item.id);
        if (it == index_.end()) {
            missing_ids.push_back(item.id);
            continue;
        }
        const auto* row = data_.data() + it->second * cols_;
        out.insert(out.end(), row, row + cols_);
    }
    if (!missing_ids.empty()) {
        throw CoverageError(fmt::format("store {} has no rows for {} image id(s): {}", dir_.string(),
                                        missing_ids.size(), list_ids(missing_ids)));
    }
    return out;
}

// --- store backends -------------------------------------------------------------

StoreFeatureBackend::StoreFeatureBackend(std::string id, const fs::path& dir) : id_(std::move(id)), table_(dir) {}

metrics::FeatureMatrix StoreFeatureBackend::features(std::span<const ImageItem> items) const {
    return {items.size(), table_.cols(), table_.gather(items), item_ids(items)};
}

void StoreFeatureBackend::check_coverage(std::span<const ImageItem> items) const {
    require_covered(id_, table_, items);
}

StoreClassifierBackend::StoreClassifierBackend(std::string id, const fs::path& dir) : id_(std::move(id)), table_(dir) {
    // Validates the probability rows once up front.
    (void)metrics::load_probability_store(dir);
}

metrics::ProbabilityMatrix StoreClassifierBackend::probabilities(std::span<const ImageItem> items) const {
    auto data = table_.gather(items);
    const auto cols = table_.cols();
    // Same renormalization as load_probability_store: binary32 rows drift off 1.
    for (std::size_t r = 0; r < items.size(); ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < cols; ++c) sum += data[r * cols + c];
        for (std::size_t c = 0; c < cols; ++c) data[r * cols + c] /= sum;
    }
    return {items.size(), cols, std::move(data), item_ids(items)};
}

void StoreClassifierBackend::check_coverage(std::span<const ImageItem> items) const {
    require_covered(id_, table_, items);
}

StoreAlignmentBackend::StoreAlignmentBackend(std::string id, const fs::path& image_dir, const fs::path& text_dir)
    : id_(std::move(id)), image_(image_dir), text_(text_dir) {
    if (image_.cols() != text_.cols()) {
        throw DimensionMismatch(fmt::format("alignment stores disagree on embedding width: {} vs {}", image_.cols(),
                                            text_.cols()));
    }
}

PairedEmbeddings StoreAlignmentBackend::embed(std::span<const ImageItem> items) const {
    auto ids = item_ids(items);
    return {metrics::FeatureMatrix(items.size(), image_.cols(), image_.gather(items), ids),
            metrics::FeatureMatrix(items.size(), text_.cols(), text_.gather(items), ids)};
}

void StoreAlignmentBackend::check_coverage(std::span<const ImageItem> items) const {
    require_covered(id_ + "/image", image_, items);
    require_covered(id_ + "/text", text_, items);
}

StorePreferenceBackend::StorePreferenceBackend(std::string id, const fs::path& dir) : id_(std::move(id)), table_(dir) {
    if (table_.cols() != 1) {
        throw InvalidInput(fmt::format("preference store {} must have exactly one column", dir.string()));
    }
}

std::vector<double> StorePreferenceBackend::scores(std::span<const ImageItem> items) const {
    return table_.gather(items);
}

void StorePreferenceBackend::check_coverage(std::span<const ImageItem> items) const {
    require_covered(id_, table_, items);
}

EmbeddingPreferenceBackend::EmbeddingPreferenceBackend(std::shared_ptr<const AlignmentBackend> embeddings,
                                                       double logit_scale)
    : embeddings_(std::move(embeddings)), logit_scale_(logit_scale) {
    if (!embeddings_) {
        throw ConfigError("preference backend needs an embedding backend");
    }
    if (!(logit_scale_ > 0.0)) {
        throw ConfigError("preference logit_scale must be positive");
    }
}

std::string EmbeddingPreferenceBackend::id() const {
    return embeddings_->id() + "-pref";
}

std::vector<double> EmbeddingPreferenceBackend::scores(std::span<const ImageItem> items) const {
    const auto pair = embeddings_->embed(items);
    auto cos = metrics::paired_cosines(pair.image, pair.text);
    for (auto& c : cos) {
        c *= logit_scale_;
    }
    return cos;
}

// --- process backends -----------------------------------------------------------

ProcessRunner::ProcessRunner(std::vector<std::string> command, fs::path work_dir)
    : command_(std::move(command)), work_dir_(std::move(work_dir)) {
    if (command_.empty()) {
        throw ConfigError("process backend: empty command");
    }
}

fs::path ProcessRunner::run(const std::string& kind, std::span<const ImageItem> items) const {
    const auto n = counter_.fetch_add(1);
    const auto dir = work_dir_ / fmt::format("{}-{}-{}", kind, ::getpid(), n);
    fs::remove_all(dir);
    fs::create_directories(dir);
    nlohmann::json request{{"schema_version", 1}, {"kind", kind}, {"output_dir", (dir / "out").string()}};
    auto& arr = request["items"] = nlohmann::json::array();
    for (const auto& item : items) {
        arr.push_back({{"id", item.id},
                       {"path", item.path.string()},
                       {"class_id", item.class_id},
                       {"class_name", item.class_name},
                       {"prompt", item.prompt}});
    }
    const auto request_path = dir / "request.json";
    util::write_json(request_path, request);
    auto argv = command_;
    argv.push_back(request_path.string());
    const auto log = dir / "backend.log";
    const auto result = util::run_process(argv, log);
    if (result.exit_code != 0) {
        throw RunFailed(fmt::format("{} backend '{}' exited with {} (signal {}):\n{}", kind, command_.front(),
                                    result.exit_code, result.term_signal, util::tail_file(log)));
    }
    return dir / "out";
}

ProcessFeatureBackend::ProcessFeatureBackend(std::string id, std::vector<std::string> command, fs::path work_dir)
    : id_(std::move(id)), runner_(std::move(command), std::move(work_dir)) {}

metrics::FeatureMatrix ProcessFeatureBackend::features(std::span<const ImageItem> items) const {
    const auto out = runner_.run("features", items);
    const auto cols = metrics::read_store_manifest(out).cols;
    return {items.size(), cols, rows_in_item_order(out, items), item_ids(items)};
}

ProcessClassifierBackend::ProcessClassifierBackend(std::string id, std::vector<std::string> command,
                                                   fs::path work_dir)
    : id_(std::move(id)), runner_(std::move(command), std::move(work_dir)) {}

metrics::ProbabilityMatrix ProcessClassifierBackend::probabilities(std::span<const ImageItem> items) const {
    const auto out = runner_.run("probabilities", items);
    const auto loaded = metrics::load_probability_store(out);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < loaded.ids().size(); ++i) {
        index.emplace(loaded.ids()[i], i);
    }
    std::vector<double> data;
    data.reserve(items.size() * loaded.cols());
    for (const auto& item : items) {
        const auto it = index.find(item.id);
        if (it == index.end()) {
            throw CoverageError(fmt::format("classifier backend '{}' returned no row for '{}'", id_, item.id));
        }
        const auto row = loaded.row(it->second);
        data.insert(data.end(), row.begin(), row.end());
    }
    return {items.size(), loaded.cols(), std::move(data), item_ids(items)};
}

ProcessAlignmentBackend::ProcessAlignmentBackend(std::string id, std::vector<std::string> command, fs::path work_dir)
    : id_(std::move(id)), runner_(std::move(command), std::move(work_dir)) {}

PairedEmbeddings ProcessAlignmentBackend::embed(std::span<const ImageItem> items) const {
    const auto out = runner_.run("alignment", items);
    const auto ids = item_ids(items);
    const auto icols = metrics::read_store_manifest(out / "image").cols;
    const auto tcols = metrics::read_store_manifest(out / "text").cols;
    return {metrics::FeatureMatrix(items.size(), icols, rows_in_item_order(out / "image", items), ids),
            metrics::FeatureMatrix(items.size(), tcols, rows_in_item_order(out / "text", items), ids)};
}

ProcessPreferenceBackend::ProcessPreferenceBackend(std::string id, std::vector<std::string> command,
                                                   fs::path work_dir)
    : id_(std::move(id)), runner_(std::move(command), std::move(work_dir)) {}

std::vector<double> ProcessPreferenceBackend::scores(std::span<const ImageItem> items) const {
    const auto out = runner_.run("preference", items);
    if (metrics::read_store_manifest(out).cols != 1) {
        throw InvalidInput(fmt::format("preference backend '{}' must return one column", id_));
    }
    return rows_in_item_order(out, items);
}

// --- config ----------------------------------------------------------------------

BackendBinding resolve_binding(const nlohmann::json& backends, const fs::path& base_dir, const fs::path& work_dir) {
    if (!backends.is_object()) {
        throw ConfigError("backends must be an object");
    }
    BackendBinding binding;
    const double logit_scale = backends.value("logit_scale", metrics::kDefaultLogitScale);

    auto type_of = [&](const char* what) -> std::string {
        if (!backends.contains(what)) {
            return {};
        }
        const auto& spec = backends.at(what);
        if (!spec.is_object() || !spec.contains("type")) {
            throw ConfigError(fmt::format("backends.{}: expected an object with a type", what));
        }
        return spec.at("type").get<std::string>();
    };
    auto spec_id = [&](const nlohmann::json& spec, std::string fallback) {
        return spec.value("id", std::move(fallback));
    };
    auto store_path = [&](const nlohmann::json& spec, const char* what, const char* key) {
        if (!spec.contains(key)) {
            throw ConfigError(fmt::format("backends.{}: store backend needs '{}'", what, key));
        }
        return resolve(base_dir, spec.at(key).get<std::string>());
    };

    std::shared_ptr<const toy::ToyBackends> toy_backends;
    auto toy_for = [&](const nlohmann::json& spec, const char* what) {
        const auto path = store_path(spec, what, "toy_config");
        if (!toy_backends) {
            toy_backends = std::make_shared<toy::ToyBackends>(toy::ToyConfig::load(path));
        }
        return toy_backends;
    };

    for (const char* what : {"feature", "classifier", "alignment", "preference"}) {
        const auto type = type_of(what);
        if (type.empty()) {
            if (std::string(what) == "preference") {
                continue;  // derived from alignment below
            }
            throw ConfigError(fmt::format("backends.{} is required", what));
        }
        const auto& spec = backends.at(what);
        const std::string w(what);
        if (type == "store") {
            if (w == "feature") {
                const auto p = store_path(spec, what, "path");
                binding.feature = std::make_shared<StoreFeatureBackend>(spec_id(spec, "store-" + p.filename().string()), p);
            } else if (w == "classifier") {
                const auto p = store_path(spec, what, "path");
                binding.classifier =
                    std::make_shared<StoreClassifierBackend>(spec_id(spec, "store-" + p.filename().string()), p);
            } else if (w == "alignment") {
                const auto ip = store_path(spec, what, "image_store");
                const auto tp = store_path(spec, what, "text_store");
                binding.alignment = std::make_shared<StoreAlignmentBackend>(spec_id(spec, "store-alignment"), ip, tp);
            } else {
                if (spec.contains("path")) {
                    const auto p = store_path(spec, what, "path");
                    binding.preference =
                        std::make_shared<StorePreferenceBackend>(spec_id(spec, "store-" + p.filename().string()), p);
                } else {
                    const auto ip = store_path(spec, what, "image_store");
                    const auto tp = store_path(spec, what, "text_store");
                    binding.preference = std::make_shared<EmbeddingPreferenceBackend>(
                        std::make_shared<StoreAlignmentBackend>(spec_id(spec, "store-preference"), ip, tp),
                        spec.value("logit_scale", logit_scale));
                }
            }
        } else if (type == "process") {
            const auto cmd = command_from_json(spec, what);
            const auto id = spec_id(spec, default_process_id(cmd));
            const auto scratch = work_dir / ("backend-" + w);
            if (w == "feature") {
                binding.feature = std::make_shared<ProcessFeatureBackend>(id, cmd, scratch);
            } else if (w == "classifier") {
                binding.classifier = std::make_shared<ProcessClassifierBackend>(id, cmd, scratch);
            } else if (w == "alignment") {
                binding.alignment = std::make_shared<ProcessAlignmentBackend>(id, cmd, scratch);
            } else {
                binding.preference = std::make_shared<ProcessPreferenceBackend>(id, cmd, scratch);
            }
        } else if (type == "toy") {
            auto toys = toy_for(spec, what);
            if (w == "feature") {
                binding.feature = std::shared_ptr<const FeatureBackend>(toys, &toys->feature());
            } else if (w == "classifier") {
                binding.classifier = std::shared_ptr<const ClassifierBackend>(toys, &toys->classifier());
            } else if (w == "alignment") {
                binding.alignment = std::shared_ptr<const AlignmentBackend>(toys, &toys->alignment());
            } else {
                binding.preference = std::make_shared<EmbeddingPreferenceBackend>(
                    std::shared_ptr<const AlignmentBackend>(toys, &toys->alignment()),
                    spec.value("logit_scale", logit_scale));
            }
        } else {
            throw ConfigError(fmt::format("backends.{}: unknown type '{}' (expected store, process or toy)", what, type));
        }
    }
    if (!binding.preference) {
        binding.preference = std::make_shared<EmbeddingPreferenceBackend>(binding.alignment, logit_scale);
    }
    return binding;
}

}  // namespace genbench::harness
