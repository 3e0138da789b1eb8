#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "genbench/run_key.hpp"

namespace genbench::harness {

enum class ModelFamily { Default, Conversational, LabelId };

ModelFamily parse_model_family(const std::string& name);
std::string model_family_name(ModelFamily family);

struct ModelSpec {
    std::string id;
    ModelFamily family = ModelFamily::Default;
    std::vector<std::string> adapter;   ///< argv; the job path is appended
    std::optional<double> fixed_cfg;    ///< model cannot take CFG at inference
    bool dynamic_steps = false;         ///< adaptive solver, steps recorded as "dynamic"
};

struct DatasetRef {
    std::string id;
    std::filesystem::path path;  ///< dataset.json, or the directory holding it
};

inline const std::vector<double> kDefaultCfgGrid{1, 3, 6, 7, 9, 12, 15};
inline const std::vector<int> kDefaultStepGrid{1, 5, 10, 15, 20, 25};
inline constexpr long long kDefaultSeed = 42;
inline constexpr std::size_t kDefaultBatchSize = 256;

struct GenbenchConfig {
    std::vector<ModelSpec> models;
    std::vector<double> cfg_values;
    std::vector<Steps> step_values;
    std::vector<DatasetRef> datasets;
    long long seed = kDefaultSeed;
    std::optional<std::size_t> workers;
    nlohmann::json backends;  ///< resolved by resolve_binding
    std::size_t batch_size = kDefaultBatchSize;
    std::size_t is_splits = 10;
    std::optional<std::filesystem::path> bounds;
    std::filesystem::path base_dir;  ///< directory of the config file

    /// Validates against the bundled schema, then applies defaults.
    static GenbenchConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
    static GenbenchConfig load(const std::filesystem::path& path);
};

/// The bundled config schema (schema/genbench.schema.json).
const nlohmann::json& config_schema();

}  // namespace genbench::harness
