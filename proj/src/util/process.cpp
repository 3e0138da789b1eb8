#include "genbench/util/process.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "genbench/util/error.hpp"

extern char** environ;

namespace genbench::util {

ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::optional<std::filesystem::path>& log_path,
                          const std::optional<std::filesystem::path>& working_dir) {
    if (argv.empty()) {
        throw InvalidInput("run_process: empty command");
    }
    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const auto& a : argv) {
        args.push_back(const_cast<char*>(a.c_str()));
    }
    args.push_back(nullptr);

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    if (log_path) {
        if (log_path->has_parent_path()) {
            std::filesystem::create_directories(log_path->parent_path());
        }
        posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log_path->c_str(),
                                         O_WRONLY | O_CREAT | O_APPEND, 0644);
        posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
    }
    if (working_dir) {
        posix_spawn_file_actions_addchdir_np(&actions, working_dir->c_str());
    }

    const auto start = std::chrono::steady_clock::now();
    pid_t pid = 0;
    const int rc = posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) {
        throw RunFailed(fmt::format("cannot start '{}': {}", argv[0], std::strerror(rc)));
    }

    int status = 0;
    rusage usage{};
    pid_t waited = 0;
    do {
        waited = ::wait4(pid, &status, 0, &usage);
    } while (waited < 0 && errno == EINTR);
    if (waited < 0) {
        throw RunFailed(fmt::format("wait for '{}' failed: {}", argv[0], std::strerror(errno)));
    }

    ProcessResult result;
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.max_rss_kib = usage.ru_maxrss;
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.term_signal = WTERMSIG(status);
    }
    return result;
}

std::string tail_file(const std::filesystem::path& path, std::size_t max_bytes) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) {
        return {};
    }
    const auto size = static_cast<std::size_t>(in.tellg());
    const auto start = size > max_bytes ? size - max_bytes : 0;
    in.seekg(static_cast<std::streamoff>(start));
    std::string out(size - start, '\0');
    in.read(out.data(), static_cast<std::streamsize>(out.size()));
    return out;
}

}  // namespace genbench::util
