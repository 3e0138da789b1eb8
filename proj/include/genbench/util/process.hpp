#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace genbench::util {

struct ProcessResult {
    int exit_code = -1;          ///< -1 when killed by a signal
    int term_signal = 0;
    long max_rss_kib = 0;        ///< peak resident set of the child
    double wall_seconds = 0.0;
};

/// Runs argv[0] (PATH lookup) with stdout+stderr appended to `log_path` when given,
/// otherwise inherited. Blocks until the child exits.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::optional<std::filesystem::path>& log_path = std::nullopt,
                          const std::optional<std::filesystem::path>& working_dir = std::nullopt);

/// Last `max_bytes` of a log file, for error diagnostics.
std::string tail_file(const std::filesystem::path& path, std::size_t max_bytes = 2048);

}  // namespace genbench::util
