#include "genbench/util/files.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <unistd.h>

#include "genbench/util/error.hpp"

namespace genbench::util {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("cannot read {}", path.string()));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const fs::path& path, std::string_view contents) {
    static std::atomic<unsigned> counter{0};
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    const auto tmp = path.parent_path() /
                     fmt::format(".{}.tmp.{}.{}", path.filename().string(), ::getpid(), counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError(fmt::format("cannot write {}", tmp.string()));
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) {
            throw IoError(fmt::format("short write to {}", tmp.string()));
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError(fmt::format("cannot rename {} -> {}: {}", tmp.string(), path.string(), ec.message()));
    }
}

nlohmann::json read_json(const fs::path& path) {
    const auto text = read_text(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
    }
}

void write_json(const fs::path& path, const nlohmann::json& value) {
    write_atomic(path, value.dump(2) + "\n");
}

}  // namespace genbench::util
