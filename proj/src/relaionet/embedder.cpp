#include "genbench/relaionet/embedder.hpp"

#include <unistd.h>

#include <fmt/format.h>
#include <json.hpp>

#include "genbench/metrics/feature_store.hpp"
#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"
#include "genbench/util/process.hpp"

namespace genbench::relaionet {

namespace fs = std::filesystem;

ProcessTextEmbedder::ProcessTextEmbedder(std::vector<std::string> command, fs::path work_dir)
    : command_(std::move(command)), work_dir_(std::move(work_dir)) {
    if (command_.empty()) {
        throw ConfigError("text embedder: empty command");
    }
}

metrics::FeatureMatrix ProcessTextEmbedder::embed(const std::vector<std::string>& texts) const {
    const auto dir = work_dir_ / fmt::format("embed-{}-{}", ::getpid(), counter_.fetch_add(1));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto request = dir / "request.json";
    util::write_json(request, {{"schema_version", 1},
                               {"kind", "text"},
                               {"texts", texts},
                               {"output_dir", (dir / "out").string()}});
    auto argv = command_;
    argv.push_back(request.string());
    const auto log = dir / "embedder.log";
    const auto result = util::run_process(argv, log);
    if (result.exit_code != 0) {
        throw RunFailed(fmt::format("text embedder '{}' exited with {}:\n{}", command_.front(), result.exit_code,
                                    util::tail_file(log)));
    }
    auto m = metrics::load_feature_store(dir / "out");
    if (m.rows() != texts.size()) {
        throw InvalidInput(fmt::format("text embedder returned {} rows for {} texts", m.rows(), texts.size()));
    }
    fs::remove_all(dir);
    return m;
}

}  // namespace genbench::relaionet
