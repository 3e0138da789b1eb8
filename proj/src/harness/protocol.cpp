#include "genbench/harness/protocol.hpp"

#include <fmt/format.h>

#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"

namespace genbench::harness {

nlohmann::json AdapterJob::to_json() const {
    nlohmann::json samples_json = nlohmann::json::array();
    for (const auto& s : samples) {
        samples_json.push_back({{"id", s.id}, {"class_id", s.class_id}, {"class_name", s.class_name}, {"prompt", s.prompt}});
    }
    return {{"schema_version", 1},
            {"model_id", model_id},
            {"cfg", cfg ? nlohmann::json(*cfg) : nlohmann::json(nullptr)},
            {"steps", steps.to_json()},
            {"seed", seed},
            {"samples", samples_json},
            {"output_dir", output_dir.string()}};
}

AdapterJob AdapterJob::from_json(const nlohmann::json& j) {
    AdapterJob job;
    try {
        if (j.at("schema_version").get<int>() != 1) {
            throw InvalidInput("job: unsupported schema_version");
        }
        job.model_id = j.at("model_id").get<std::string>();
        if (!j.at("cfg").is_null()) {
            job.cfg = j.at("cfg").get<double>();
        }
        job.steps = Steps::from_json(j.at("steps"));
        job.seed = j.at("seed").get<long long>();
        for (const auto& s : j.at("samples")) {
            job.samples.push_back({s.at("id").get<std::string>(), s.at("class_id").get<int>(),
                                   s.at("class_name").get<std::string>(), s.at("prompt").get<std::string>()});
        }
        job.output_dir = j.at("output_dir").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("job: {}", e.what()));
    }
    return job;
}

AdapterJob AdapterJob::load(const std::filesystem::path& path) { return from_json(util::read_json(path)); }

nlohmann::json AdapterResult::to_json() const {
    nlohmann::json images_json = nlohmann::json::array();
    for (const auto& im : images) {
        images_json.push_back({{"id", im.id}, {"file", im.file}});
    }
    nlohmann::json j{{"status", status}, {"images", images_json}};
    if (nfe) {
        j["nfe"] = *nfe;
    }
    return j;
}

AdapterResult AdapterResult::from_json(const nlohmann::json& j) {
    AdapterResult r;
    try {
        r.status = j.at("status").get<std::string>();
        for (const auto& im : j.at("images")) {
            r.images.push_back({im.at("id").get<std::string>(), im.at("file").get<std::string>()});
        }
        if (j.contains("nfe") && !j.at("nfe").is_null()) {
            r.nfe = j.at("nfe").get<std::vector<long long>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("result: {}", e.what()));
    }
    return r;
}

}  // namespace genbench::harness
