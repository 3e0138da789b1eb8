#pragma once

// Reference dataset definition (dataset.json):
//   {schema_version:1, id, examples:[{id, class_id, class_name}],
//    reference_features: "<store dir>" | {"<feature backend id>": "<store dir>", ...}}
// Relative paths resolve against the file's directory.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace genbench::harness {

struct ReferenceExample {
    std::string id;
    int class_id = 0;
    std::string class_name;
};

/// Per-class example counts; `imbalanced` when they differ.
struct ClassBalance {
    std::size_t classes = 0;
    std::size_t min_count = 0;
    std::size_t max_count = 0;
    bool imbalanced = false;
    nlohmann::json to_json() const;
};

class ReferenceDataset {
public:
    ReferenceDataset(std::string id, std::vector<ReferenceExample> examples,
                     std::map<std::string, std::filesystem::path> reference_features);

    static ReferenceDataset from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
    static ReferenceDataset load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    const std::string& id() const noexcept { return id_; }
    const std::vector<ReferenceExample>& examples() const noexcept { return examples_; }
    ClassBalance class_balance() const;

    /// Store for a feature backend id; a "*" entry serves any backend. IoError when absent.
    std::filesystem::path reference_store(const std::string& backend_id) const;

private:
    std::string id_;
    std::vector<ReferenceExample> examples_;
    std::map<std::string, std::filesystem::path> reference_features_;
};

}  // namespace genbench::harness
