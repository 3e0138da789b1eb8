#include "genbench/harness/dataset.hpp"

#include <set>

#include <fmt/format.h>

#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"

namespace genbench::harness {

namespace fs = std::filesystem;

nlohmann::json ClassBalance::to_json() const {
    return {{"classes", classes}, {"min_per_class", min_count}, {"max_per_class", max_count},
            {"imbalanced", imbalanced}};
}

ReferenceDataset::ReferenceDataset(std::string id, std::vector<ReferenceExample> examples,
                                   std::map<std::string, fs::path> reference_features)
    : id_(std::move(id)), examples_(std::move(examples)), reference_features_(std::move(reference_features)) {
    if (id_.empty()) {
        throw InvalidInput("dataset id must be nonempty");
    }
    if (examples_.empty()) {
        throw InvalidInput(fmt::format("dataset '{}' has no examples", id_));
    }
    std::set<std::string> seen;
    for (const auto& ex : examples_) {
        if (ex.class_name.empty()) {
            throw InvalidInput(fmt::format("dataset '{}': example '{}' has an empty class name", id_, ex.id));
        }
        if (!seen.insert(ex.id).second) {
            throw InvalidInput(fmt::format("dataset '{}': duplicate example id '{}'", id_, ex.id));
        }
    }
}

ReferenceDataset ReferenceDataset::from_json(const nlohmann::json& j, const fs::path& base_dir) {
    try {
        if (j.value("schema_version", 1) != 1) {
            throw InvalidInput("dataset: unsupported schema_version");
        }
        std::vector<ReferenceExample> examples;
        for (const auto& e : j.at("examples")) {
            examples.push_back({e.at("id").get<std::string>(), e.at("class_id").get<int>(),
                                e.at("class_name").get<std::string>()});
        }
        std::map<std::string, fs::path> refs;
        auto resolve = [&](const std::string& p) {
            const fs::path path(p);
            return path.is_absolute() ? path : base_dir / path;
        };
        if (j.contains("reference_features")) {
            const auto& rf = j.at("reference_features");
            if (rf.is_string()) {
                refs["*"] = resolve(rf.get<std::string>());
            } else {
                for (const auto& [backend, path] : rf.items()) {
                    refs[backend] = resolve(path.get<std::string>());
                }
            }
        }
        return {j.at("id").get<std::string>(), std::move(examples), std::move(refs)};
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("dataset definition: {}", e.what()));
    }
}

ReferenceDataset ReferenceDataset::load(const fs::path& given) {
    const auto path = fs::is_directory(given) ? given / "dataset.json" : given;
    if (!fs::exists(path)) {
        throw IoError(fmt::format("dataset definition not found: {}", path.string()));
    }
    return from_json(util::read_json(path), path.parent_path());
}

nlohmann::json ReferenceDataset::to_json() const {
    nlohmann::json examples = nlohmann::json::array();
    for (const auto& e : examples_) {
        examples.push_back({{"id", e.id}, {"class_id", e.class_id}, {"class_name", e.class_name}});
    }
    nlohmann::json refs = nlohmann::json::object();
    for (const auto& [backend, path] : reference_features_) {
        refs[backend] = path.string();
    }
    return {{"schema_version", 1}, {"id", id_}, {"examples", examples}, {"reference_features", refs}};
}

ClassBalance ReferenceDataset::class_balance() const {
    std::map<int, std::size_t> counts;
    for (const auto& e : examples_) {
        ++counts[e.class_id];
    }
    ClassBalance b;
    b.classes = counts.size();
    b.min_count = examples_.size();
    for (const auto& [cls, n] : counts) {
        b.min_count = std::min(b.min_count, n);
        b.max_count = std::max(b.max_count, n);
    }
    b.imbalanced = b.min_count != b.max_count;
    return b;
}

fs::path ReferenceDataset::reference_store(const std::string& backend_id) const {
    if (const auto it = reference_features_.find(backend_id); it != reference_features_.end()) {
        return it->second;
    }
    if (const auto it = reference_features_.find("*"); it != reference_features_.end()) {
        return it->second;
    }
    throw IoError(fmt::format("dataset '{}' has no reference feature store for backend '{}'", id_, backend_id));
}

}  // namespace genbench::harness
