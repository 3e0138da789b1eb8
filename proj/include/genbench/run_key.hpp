#pragma once

#include <compare>
#include <optional>
#include <string>

#include <json.hpp>

namespace genbench {

/// Step budget of a run: a fixed ODE/denoising step count, or `dynamic` for
/// adaptive solvers that choose their own step sizes.
class Steps {
public:
    Steps() = default;
    explicit Steps(int count);
    static Steps dynamic() { return Steps(std::nullopt); }

    bool is_dynamic() const noexcept { return !count_.has_value(); }
    int count() const;  ///< throws for dynamic

    std::string to_string() const;  ///< "25" or "dynamic"
    static Steps parse(const std::string& text);

    nlohmann::json to_json() const;
    static Steps from_json(const nlohmann::json& j);

    /// Fixed counts order numerically, before dynamic.
    friend std::strong_ordering operator<=>(const Steps& a, const Steps& b);
    friend bool operator==(const Steps& a, const Steps& b) = default;

private:
    explicit Steps(std::optional<int> c) : count_(c) {}
    std::optional<int> count_ = 1;
};

/// Identity of one generation/evaluation run.
struct RunKey {
    std::string model;
    double cfg = 1.0;
    Steps steps;
    std::string dataset;
    long long seed = 42;

    /// "model|cfg=7|steps=25|dataset|seed=42"; canonical and parseable.
    std::string to_string() const;
    static RunKey parse(const std::string& text);

    /// Filesystem-safe directory name; a hash of to_string() is appended when
    /// characters had to be replaced.
    std::string dir_name() const;

    nlohmann::json to_json() const;
    static RunKey from_json(const nlohmann::json& j);

    friend std::strong_ordering operator<=>(const RunKey& a, const RunKey& b);
    friend bool operator==(const RunKey& a, const RunKey& b);
};

/// Shortest round-trip decimal for a CFG value ("7", "1.42").
std::string format_cfg(double cfg);

}  // namespace genbench
