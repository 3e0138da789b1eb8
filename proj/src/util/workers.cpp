#include "genbench/util/workers.hpp"

#include <cstdlib>
#include <string>

namespace genbench::util {

std::size_t worker_budget(std::size_t fallback) {
    if (const char* env = std::getenv("GENBENCH_WORKERS"); env != nullptr) {
        try {
            const long v = std::stol(env);
            if (v > 0) {
                return static_cast<std::size_t>(v);
            }
        } catch (const std::exception&) {
            // ignored: fall through to the default budget
        }
    }
    if (fallback > 0) {
        return fallback;
    }
    const auto hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

}  // namespace genbench::util
