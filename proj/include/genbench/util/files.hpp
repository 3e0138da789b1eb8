#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace genbench::util {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path);

/// Writes to a sibling temp file and renames it into place.
void write_atomic(const fs::path& path, std::string_view contents);

nlohmann::json read_json(const fs::path& path);

/// Serializes with two-space indent and a trailing newline, then writes atomically.
void write_json(const fs::path& path, const nlohmann::json& value);

}  // namespace genbench::util
