#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "genbench/metrics/matrix.hpp"

namespace genbench::testing {

namespace fs = std::filesystem;

inline fs::path fixture(const std::string& name) { return fs::path(GENBENCH_FIXTURE_DIR) / name; }
inline fs::path config_file(const std::string& name) { return fs::path(GENBENCH_CONFIG_DIR) / name; }
inline const std::string& helper_binary() {
    static const std::string path = GENBENCH_TEST_HELPER;
    return path;
}
inline const std::string& cli_binary() {
    static const std::string path = GENBENCH_CLI;
    return path;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() / ("genbench-test-" + std::to_string(::getpid()) + "-" +
                                             std::to_string(counter.fetch_add(1)));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const noexcept { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline metrics::FeatureMatrix random_features(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                                              double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    std::vector<double> data(rows * cols);
    for (auto& v : data) v = g(rng);
    return {rows, cols, std::move(data)};
}

inline std::vector<std::string> numbered_ids(const std::string& prefix, std::size_t n) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
    return ids;
}

}  // namespace genbench::testing
