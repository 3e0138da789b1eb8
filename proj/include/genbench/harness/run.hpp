#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "genbench/harness/config.hpp"
#include "genbench/harness/dataset.hpp"
#include "genbench/run_key.hpp"

namespace genbench::harness {

inline constexpr const char* kDefaultPromptTemplate = "a photo of a {class}";
inline constexpr const char* kConversationalPromptTemplate = "Can you generate a photo of a {class}?";

std::string prompt_template_for(ModelFamily family);

/// Fills the family's template. Label-id families get the default template;
/// their integer class id travels in the job alongside it.
std::string render_prompt(ModelFamily family, const std::string& class_name);

/// Replaces every "{class}" in `templ`.
std::string fill_template(const std::string& templ, const std::string& class_name);

/// One generation request, in reference-example order.
struct ClassPlanEntry {
    std::string sample_id;   ///< "g000000", "g000001", ...
    std::string example_id;  ///< reference example it stands for
    int class_id = 0;
    std::string class_name;
    std::string prompt;
};

struct RunSpec {
    RunKey key;
    std::vector<std::string> adapter;
    ModelFamily family = ModelFamily::Default;
    bool fixed_cfg = false;  ///< cfg is recorded but not sent to the adapter
    std::string prompt_template;
    std::vector<ClassPlanEntry> class_plan;
    ClassBalance class_balance;
    std::filesystem::path output_dir;

    nlohmann::json to_json() const;
    /// SHA-256 over the canonical JSON of everything that shapes the outputs.
    std::string digest() const;
};

std::string sample_id(std::size_t index);

/// Builds the class plan for `dataset` and fills in `output_dir` under out_root/runs.
RunSpec make_run_spec(const ModelSpec& model, double cfg, Steps steps, const ReferenceDataset& dataset,
                      long long seed, const std::filesystem::path& out_root);

/// Runs for models x datasets x cfg x steps, in that nesting order. Fixed-CFG
/// models skip grid points other than their baked-in value; dynamic-step models
/// get one run per cfg with steps = dynamic. Unknown dataset ids and empty
/// plans are ConfigErrors.
std::vector<RunSpec> plan_sweep(const GenbenchConfig& config,
                                const std::map<std::string, ReferenceDataset>& datasets,
                                const std::filesystem::path& out_root);

/// Loads every dataset the config names.
std::map<std::string, ReferenceDataset> load_datasets(const GenbenchConfig& config);

struct NfeStats {
    double mean = 0.0;
    long long min = 0;
    long long max = 0;
    std::size_t count = 0;
};

NfeStats summarize_nfe(const std::vector<long long>& nfe);

struct ManifestEntry {
    std::string id;
    std::filesystem::path path;  ///< relative to the manifest's directory, or absolute
    int class_id = 0;
    std::string class_name;
    std::string prompt;
    std::string sha256;
};

inline constexpr const char* kManifestFile = "manifest.json";

struct RunManifest {
    RunKey key;
    std::string status;  ///< "complete"
    std::string source;  ///< "adapter" or "ingest"
    std::string spec_digest;
    std::vector<ManifestEntry> entries;
    std::optional<NfeStats> nfe_stats;
    double wall_seconds = 0.0;
    ClassBalance class_balance;
    std::filesystem::path dir;  ///< where manifest.json lives; not serialized

    std::filesystem::path image_path(const ManifestEntry& e) const;

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j, const std::filesystem::path& dir);
    static RunManifest load(const std::filesystem::path& dir);
    void save() const;
};

/// True when dir/manifest.json is complete, matches `spec`, and every image
/// still hashes to its recorded digest.
bool manifest_is_current(const RunSpec& spec);

/// Writes job.json, runs the adapter once, validates and hashes its images and
/// writes manifest.json atomically. A run whose manifest is already current is
/// returned as-is without invoking the adapter (`reused` set to true).
RunManifest execute_run(const RunSpec& spec, bool* reused = nullptr);

/// Builds a manifest for pre-generated images named <sample_id>.<ext> in `images_dir`.
RunManifest ingest_directory(const std::filesystem::path& images_dir, const RunSpec& spec);

}  // namespace genbench::harness
