#include "genbench/harness/run.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "genbench/harness/protocol.hpp"
#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"
#include "genbench/util/hash.hpp"
#include "genbench/util/process.hpp"

namespace genbench::harness {
namespace {

namespace fs = std::filesystem;

std::string join_ids(const std::vector<std::string>& ids, std::size_t limit = 20) {
    std::string out;
    for (std::size_t i = 0; i < ids.size() && i < limit; ++i) {
        out += (i ? ", " : "") + ids[i];
    }
    if (ids.size() > limit) {
        out += fmt::format(", ... ({} total)", ids.size());
    }
    return out;
}

fs::path relative_if_inside(const fs::path& file, const fs::path& dir) {
    const auto abs_file = fs::weakly_canonical(fs::absolute(file));
    const auto abs_dir = fs::weakly_canonical(fs::absolute(dir));
    const auto rel = abs_file.lexically_relative(abs_dir);
    if (!rel.empty() && *rel.begin() != "..") {
        return rel;
    }
    return abs_file;
}

RunManifest base_manifest(const RunSpec& spec, std::string source) {
    RunManifest m;
    m.key = spec.key;
    m.status = "complete";
    m.source = std::move(source);
    m.spec_digest = spec.digest();
    m.class_balance = spec.class_balance;
    m.dir = spec.output_dir;
    return m;
}

/// Matches produced files against the plan; returns entries in plan order.
std::vector<ManifestEntry> bind_images(const RunSpec& spec, const std::map<std::string, fs::path>& files) {
    std::vector<std::string> missing;
    for (const auto& e : spec.class_plan) {
        if (!files.contains(e.sample_id)) {
            missing.push_back(e.sample_id);
        }
    }
    std::set<std::string> planned;
    for (const auto& e : spec.class_plan) {
        planned.insert(e.sample_id);
    }
    std::vector<std::string> extra;
    for (const auto& [id, path] : files) {
        if (!planned.contains(id)) {
            extra.push_back(id);
        }
    }
    if (!missing.empty() || !extra.empty()) {
        std::string msg = fmt::format("run {}: expected {} images, got {}", spec.key.to_string(),
                                      spec.class_plan.size(), files.size());
        if (!missing.empty()) msg += fmt::format("; missing ids: {}", join_ids(missing));
        if (!extra.empty()) msg += fmt::format("; unexpected ids: {}", join_ids(extra));
        throw IncompleteRun(msg);
    }
    std::vector<ManifestEntry> entries;
    entries.reserve(spec.class_plan.size());
    for (const auto& e : spec.class_plan) {
        const auto& file = files.at(e.sample_id);
        if (!fs::is_regular_file(file)) {
            throw IncompleteRun(fmt::format("run {}: image for '{}' not found at {}", spec.key.to_string(),
                                            e.sample_id, file.string()));
        }
        entries.push_back({e.sample_id, relative_if_inside(file, spec.output_dir), e.class_id, e.class_name,
                           e.prompt, util::sha256_file(file)});
    }
    return entries;
}

}  // namespace

std::string prompt_template_for(ModelFamily family) {
    return family == ModelFamily::Conversational ? kConversationalPromptTemplate : kDefaultPromptTemplate;
}

std::string fill_template(const std::string& templ, const std::string& class_name) {
    static const std::string token = "{class}";
    std::string out;
    std::size_t pos = 0;
    for (;;) {
        const auto hit = templ.find(token, pos);
        if (hit == std::string::npos) {
            out += templ.substr(pos);
            return out;
        }
        out += templ.substr(pos, hit - pos);
        out += class_name;
        pos = hit + token.size();
    }
}

std::string render_prompt(ModelFamily family, const std::string& class_name) {
    if (class_name.empty()) {
        throw InvalidInput("render_prompt: class name must be nonempty");
    }
    return fill_template(prompt_template_for(family), class_name);
}

std::string sample_id(std::size_t index) {
    return fmt::format("g{:06}", index);
}

nlohmann::json RunSpec::to_json() const {
    nlohmann::json plan = nlohmann::json::array();
    for (const auto& e : class_plan) {
        plan.push_back({{"id", e.sample_id},
                        {"example_id", e.example_id},
                        {"class_id", e.class_id},
                        {"class_name", e.class_name},
                        {"prompt", e.prompt}});
    }
    return {{"key", key.to_json()},
            {"adapter", adapter},
            {"family", model_family_name(family)},
            {"fixed_cfg", fixed_cfg},
            {"prompt_template", prompt_template},
            {"class_plan", plan},
            {"class_balance", class_balance.to_json()},
            {"output_dir", output_dir.string()}};
}

std::string RunSpec::digest() const {
    auto j = to_json();
    j.erase("output_dir");
    return util::sha256_hex(j.dump());
}

RunSpec make_run_spec(const ModelSpec& model, double cfg, Steps steps, const ReferenceDataset& dataset,
                      long long seed, const fs::path& out_root) {
    RunSpec spec;
    spec.key = RunKey{model.id, cfg, steps, dataset.id(), seed};
    spec.adapter = model.adapter;
    spec.family = model.family;
    spec.fixed_cfg = model.fixed_cfg.has_value();
    spec.prompt_template = prompt_template_for(model.family);
    spec.class_balance = dataset.class_balance();
    const auto& examples = dataset.examples();
    spec.class_plan.reserve(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto& ex = examples[i];
        spec.class_plan.push_back(
            {sample_id(i), ex.id, ex.class_id, ex.class_name, fill_template(spec.prompt_template, ex.class_name)});
    }
    spec.output_dir = out_root / "runs" / spec.key.dir_name();
    return spec;
}

std::map<std::string, ReferenceDataset> load_datasets(const GenbenchConfig& config) {
    std::map<std::string, ReferenceDataset> out;
    for (const auto& ref : config.datasets) {
        auto ds = ReferenceDataset::load(ref.path);
        if (ds.id() != ref.id) {
            throw ConfigError(fmt::format("dataset '{}' at {} declares id '{}'", ref.id, ref.path.string(), ds.id()));
        }
        out.emplace(ref.id, std::move(ds));
    }
    return out;
}

std::vector<RunSpec> plan_sweep(const GenbenchConfig& config, const std::map<std::string, ReferenceDataset>& datasets,
                                const fs::path& out_root) {
    if (config.cfg_values.empty() || config.step_values.empty() || config.models.empty() ||
        config.datasets.empty()) {
        throw ConfigError("sweep grid is empty");
    }
    for (double cfg : config.cfg_values) {
        if (!(cfg >= 1.0)) {
            throw ConfigError(fmt::format("cfg value {} must be >= 1", cfg));
        }
    }
    std::vector<RunSpec> plan;
    std::set<RunKey> keys;
    for (const auto& model : config.models) {
        for (const auto& ref : config.datasets) {
            const auto it = datasets.find(ref.id);
            if (it == datasets.end()) {
                throw ConfigError(fmt::format("unknown dataset '{}'", ref.id));
            }
            for (double cfg : config.cfg_values) {
                if (model.fixed_cfg && *model.fixed_cfg != cfg) {
                    continue;
                }
                if (model.dynamic_steps) {
                    plan.push_back(make_run_spec(model, cfg, Steps::dynamic(), it->second, config.seed, out_root));
                    continue;
                }
                for (const auto& steps : config.step_values) {
                    if (steps.is_dynamic()) {
                        continue;
                    }
                    plan.push_back(make_run_spec(model, cfg, steps, it->second, config.seed, out_root));
                }
            }
        }
    }
    for (const auto& spec : plan) {
        if (!keys.insert(spec.key).second) {
            throw ConfigError(fmt::format("duplicate run key {}", spec.key.to_string()));
        }
    }
    if (plan.empty()) {
        throw ConfigError("sweep plan is empty after applying model capabilities");
    }
    return plan;
}

NfeStats summarize_nfe(const std::vector<long long>& nfe) {
    if (nfe.empty()) {
        throw InvalidInput("nfe list is empty");
    }
    NfeStats s;
    s.count = nfe.size();
    s.min = *std::min_element(nfe.begin(), nfe.end());
    s.max = *std::max_element(nfe.begin(), nfe.end());
    const long double total = std::accumulate(nfe.begin(), nfe.end(), 0.0L);
    s.mean = static_cast<double>(total / static_cast<long double>(nfe.size()));
    return s;
}

// --- manifest ---------------------------------------------------------------------

fs::path RunManifest::image_path(const ManifestEntry& e) const {
    return e.path.is_absolute() ? e.path : dir / e.path;
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json entries_json = nlohmann::json::array();
    for (const auto& e : entries) {
        entries_json.push_back({{"id", e.id},
                                {"path", e.path.generic_string()},
                                {"class_id", e.class_id},
                                {"class_name", e.class_name},
                                {"prompt", e.prompt},
                                {"sha256", e.sha256}});
    }
    nlohmann::json j{{"schema_version", 1},
                     {"run_key", key.to_string()},
                     {"key", key.to_json()},
                     {"status", status},
                     {"source", source},
                     {"spec_digest", spec_digest},
                     {"count", entries.size()},
                     {"entries", entries_json},
                     {"class_balance", class_balance.to_json()},
                     {"wall_seconds", wall_seconds}};
    if (nfe_stats) {
        j["nfe_stats"] = {{"mean", nfe_stats->mean},
                          {"min", nfe_stats->min},
                          {"max", nfe_stats->max},
                          {"count", nfe_stats->count}};
    } else {
        j["nfe_stats"] = nullptr;
    }
    return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j, const fs::path& dir) {
    try {
        RunManifest m;
        m.dir = dir;
        m.key = RunKey::from_json(j.at("key"));
        m.status = j.at("status").get<std::string>();
        m.source = j.value("source", std::string("adapter"));
        m.spec_digest = j.value("spec_digest", std::string());
        m.wall_seconds = j.value("wall_seconds", 0.0);
        for (const auto& e : j.at("entries")) {
            m.entries.push_back({e.at("id").get<std::string>(), fs::path(e.at("path").get<std::string>()),
                                 e.at("class_id").get<int>(), e.at("class_name").get<std::string>(),
                                 e.value("prompt", std::string()), e.at("sha256").get<std::string>()});
        }
        if (j.contains("nfe_stats") && !j.at("nfe_stats").is_null()) {
            const auto& n = j.at("nfe_stats");
            m.nfe_stats = NfeStats{n.at("mean").get<double>(), n.at("min").get<long long>(),
                                   n.at("max").get<long long>(), n.value("count", std::size_t{0})};
        }
        if (j.contains("class_balance")) {
            const auto& b = j.at("class_balance");
            m.class_balance = {b.at("classes").get<std::size_t>(), b.at("min_per_class").get<std::size_t>(),
                               b.at("max_per_class").get<std::size_t>(), b.at("imbalanced").get<bool>()};
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("run manifest in {}: {}", dir.string(), e.what()));
    }
}

RunManifest RunManifest::load(const fs::path& dir) {
    const auto path = dir / kManifestFile;
    if (!fs::exists(path)) {
        throw IoError(fmt::format("no run manifest at {}", path.string()));
    }
    return from_json(util::read_json(path), dir);
}

void RunManifest::save() const {
    util::write_json(dir / kManifestFile, to_json());
}

bool manifest_is_current(const RunSpec& spec) {
    if (!fs::exists(spec.output_dir / kManifestFile)) {
        return false;
    }
    try {
        const auto m = RunManifest::load(spec.output_dir);
        if (m.status != "complete" || m.spec_digest != spec.digest() || m.key != spec.key ||
            m.entries.size() != spec.class_plan.size()) {
            return false;
        }
        for (const auto& e : m.entries) {
            const auto p = m.image_path(e);
            if (!fs::is_regular_file(p) || util::sha256_file(p) != e.sha256) {
                return false;
            }
        }
        return true;
    } catch (const Error&) {
        return false;
    }
}

// --- execution ---------------------------------------------------------------------

RunManifest execute_run(const RunSpec& spec, bool* reused) {
    if (manifest_is_current(spec)) {
        if (reused) *reused = true;
        return RunManifest::load(spec.output_dir);
    }
    if (reused) *reused = false;
    if (spec.adapter.empty()) {
        throw ConfigError(fmt::format("run {}: no adapter command", spec.key.to_string()));
    }
    fs::create_directories(spec.output_dir);
    const auto job_path = spec.output_dir / kJobFile;
    const auto result_path = spec.output_dir / kResultFile;
    const auto log_path = spec.output_dir / "adapter.log";
    fs::remove(result_path);
    fs::remove(log_path);
    fs::remove(spec.output_dir / kManifestFile);

    AdapterJob job;
    job.model_id = spec.key.model;
    if (!spec.fixed_cfg) {
        job.cfg = spec.key.cfg;
    }
    job.steps = spec.key.steps;
    job.seed = spec.key.seed;
    job.output_dir = fs::absolute(spec.output_dir);
    job.samples.reserve(spec.class_plan.size());
    for (const auto& e : spec.class_plan) {
        job.samples.push_back({e.sample_id, e.class_id, e.class_name, e.prompt});
    }
    util::write_json(job_path, job.to_json());

    auto argv = spec.adapter;
    argv.push_back(fs::absolute(job_path).string());
    const auto started = std::chrono::steady_clock::now();
    const auto proc = util::run_process(argv, log_path);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (proc.exit_code != 0) {
        throw RunFailed(fmt::format("run {}: adapter '{}' exited with code {}{}; log tail:\n{}",
                                    spec.key.to_string(), spec.adapter.front(), proc.exit_code,
                                    proc.term_signal ? fmt::format(" (signal {})", proc.term_signal) : "",
                                    util::tail_file(log_path)));
    }
    if (!fs::exists(result_path)) {
        throw IncompleteRun(fmt::format("run {}: adapter exited 0 but wrote no {}", spec.key.to_string(), kResultFile));
    }
    const auto result = AdapterResult::from_json(util::read_json(result_path));
    if (!result.ok()) {
        throw RunFailed(fmt::format("run {}: adapter reported status '{}'; log tail:\n{}", spec.key.to_string(),
                                    result.status, util::tail_file(log_path)));
    }

    std::map<std::string, fs::path> files;
    std::vector<std::string> duplicates;
    for (const auto& img : result.images) {
        const fs::path p(img.file);
        if (!files.emplace(img.id, p.is_absolute() ? p : spec.output_dir / p).second) {
            duplicates.push_back(img.id);
        }
    }
    if (!duplicates.empty()) {
        throw IncompleteRun(
            fmt::format("run {}: adapter returned duplicate ids: {}", spec.key.to_string(), join_ids(duplicates)));
    }

    auto manifest = base_manifest(spec, "adapter");
    manifest.entries = bind_images(spec, files);
    if (result.nfe && !result.nfe->empty()) {
        manifest.nfe_stats = summarize_nfe(*result.nfe);
    }
    manifest.wall_seconds = wall;
    manifest.save();
    return manifest;
}

RunManifest ingest_directory(const fs::path& images_dir, const RunSpec& spec) {
    if (!fs::is_directory(images_dir)) {
        throw InvalidInput(fmt::format("ingest: {} is not a directory", images_dir.string()));
    }
    static const std::set<std::string> kImageExtensions{".png", ".jpg", ".jpeg", ".webp", ".bmp"};
    std::map<std::string, fs::path> files;
    std::vector<std::string> duplicates;
    std::vector<fs::path> listing;
    for (const auto& entry : fs::directory_iterator(images_dir)) {
        listing.push_back(entry.path());
    }
    std::sort(listing.begin(), listing.end());
    for (const auto& path : listing) {
        if (!fs::is_regular_file(path)) continue;
        auto ext = path.extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (!kImageExtensions.contains(ext)) continue;
        const auto id = path.stem().string();
        if (!files.emplace(id, path).second) {
            duplicates.push_back(id);
        }
    }
    if (!duplicates.empty()) {
        throw InvalidInput(fmt::format("ingest {}: duplicate image ids: {}", images_dir.string(), join_ids(duplicates)));
    }
    fs::create_directories(spec.output_dir);
    auto manifest = base_manifest(spec, "ingest");
    try {
        manifest.entries = bind_images(spec, files);
    } catch (const IncompleteRun& e) {
        throw InvalidInput(fmt::format("ingest {}: {}", images_dir.string(), e.what()));
    }
    manifest.save();
    return manifest;
}

}  // namespace genbench::harness
