#include "genbench/harness/config.hpp"

#include <set>

#include <fmt/format.h>

#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"
#include "genbench/util/json_schema.hpp"

namespace genbench::harness {
namespace {

namespace fs = std::filesystem;

// Generated from schema/genbench.schema.json at configure time.
constexpr const char* kSchemaText =
#include "genbench_config_schema.inc"
    ;

}  // namespace

ModelFamily parse_model_family(const std::string& name) {
    if (name == "default") return ModelFamily::Default;
    if (name == "conversational") return ModelFamily::Conversational;
    if (name == "label_id") return ModelFamily::LabelId;
    throw ConfigError(fmt::format("unknown model family '{}'", name));
}

std::string model_family_name(ModelFamily family) {
    switch (family) {
        case ModelFamily::Default: return "default";
        case ModelFamily::Conversational: return "conversational";
        case ModelFamily::LabelId: return "label_id";
    }
    return "default";
}

const nlohmann::json& config_schema() {
    static const nlohmann::json schema = nlohmann::json::parse(kSchemaText);
    return schema;
}

GenbenchConfig GenbenchConfig::from_json(const nlohmann::json& j, const fs::path& base_dir) {
    util::validate_schema(config_schema(), j, "config");
    auto resolve = [&](const std::string& p) {
        const fs::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };

    GenbenchConfig c;
    c.base_dir = base_dir;
    c.seed = j.value("seed", kDefaultSeed);
    if (j.contains("workers")) {
        c.workers = j.at("workers").get<std::size_t>();
    }

    std::set<std::string> model_ids;
    for (const auto& m : j.at("models")) {
        ModelSpec spec;
        spec.id = m.at("id").get<std::string>();
        if (!model_ids.insert(spec.id).second) {
            throw ConfigError(fmt::format("config: duplicate model id '{}'", spec.id));
        }
        spec.family = parse_model_family(m.value("family", std::string("default")));
        spec.adapter = m.at("adapter").get<std::vector<std::string>>();
        if (m.contains("fixed_cfg")) {
            spec.fixed_cfg = m.at("fixed_cfg").get<double>();
        }
        spec.dynamic_steps = m.value("dynamic_steps", false);
        c.models.push_back(std::move(spec));
    }

    if (j.contains("cfg_values")) {
        c.cfg_values = j.at("cfg_values").get<std::vector<double>>();
    } else {
        c.cfg_values = kDefaultCfgGrid;
    }
    if (j.contains("step_values")) {
        for (const auto& s : j.at("step_values")) {
            c.step_values.push_back(Steps::from_json(s));
        }
    } else {
        for (int s : kDefaultStepGrid) {
            c.step_values.push_back(Steps(s));
        }
    }

    std::set<std::string> dataset_ids;
    for (const auto& d : j.at("datasets")) {
        DatasetRef ref{d.at("id").get<std::string>(), resolve(d.at("path").get<std::string>())};
        if (!dataset_ids.insert(ref.id).second) {
            throw ConfigError(fmt::format("config: duplicate dataset id '{}'", ref.id));
        }
        c.datasets.push_back(std::move(ref));
    }

    c.backends = j.at("backends");
    if (j.contains("evaluation")) {
        const auto& e = j.at("evaluation");
        c.batch_size = e.value("batch_size", kDefaultBatchSize);
        c.is_splits = e.value("is_splits", std::size_t{10});
    }
    if (j.contains("bounds")) {
        c.bounds = resolve(j.at("bounds").get<std::string>());
    }
    return c;
}

GenbenchConfig GenbenchConfig::load(const fs::path& path) {
    if (!fs::exists(path)) {
        throw ConfigError(fmt::format("config file not found: {}", path.string()));
    }
    return from_json(util::read_json(path), fs::absolute(path).parent_path());
}

}  // namespace genbench::harness
