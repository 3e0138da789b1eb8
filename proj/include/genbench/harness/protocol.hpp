#pragma once

// Generator adapter protocol.
//
//   job.json     {schema_version:1, model_id, cfg:number|null, steps:int|"dynamic", seed,
//                 samples:[{id, class_id, class_name, prompt}], output_dir}
//   result.json  {status, images:[{id, file}], nfe:[int]?}   written into output_dir,
//                plus one image file per sample; exit code 0 on success.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "genbench/run_key.hpp"

namespace genbench::harness {

struct SampleRequest {
    std::string id;
    int class_id = 0;
    std::string class_name;
    std::string prompt;
};

struct AdapterJob {
    std::string model_id;
    std::optional<double> cfg;
    Steps steps;
    long long seed = 42;
    std::vector<SampleRequest> samples;
    std::filesystem::path output_dir;

    nlohmann::json to_json() const;
    static AdapterJob from_json(const nlohmann::json& j);
    static AdapterJob load(const std::filesystem::path& path);
};

struct ProducedImage {
    std::string id;
    std::string file;  ///< relative to output_dir, or absolute
};

struct AdapterResult {
    std::string status;
    std::vector<ProducedImage> images;
    std::optional<std::vector<long long>> nfe;

    bool ok() const { return status == "ok" || status == "success"; }

    nlohmann::json to_json() const;
    static AdapterResult from_json(const nlohmann::json& j);
};

inline constexpr const char* kJobFile = "job.json";
inline constexpr const char* kResultFile = "result.json";

}  // namespace genbench::harness
