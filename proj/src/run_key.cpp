#include "genbench/run_key.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "genbench/util/error.hpp"
#include "genbench/util/hash.hpp"

namespace genbench {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string strip_prefix(const std::string& s, const std::string& prefix, const std::string& whole) {
    if (s.rfind(prefix, 0) != 0) {
        throw InvalidInput(fmt::format("run key '{}': expected '{}'", whole, prefix));
    }
    return s.substr(prefix.size());
}

double parse_double(const std::string& s, const std::string& whole) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw InvalidInput(fmt::format("run key '{}': bad number '{}'", whole, s));
    }
}

}  // namespace

Steps::Steps(int count) : count_(count) {
    if (count < 1) {
        throw InvalidInput(fmt::format("step count must be >= 1, got {}", count));
    }
}

int Steps::count() const {
    if (!count_) {
        throw InvalidInput("dynamic step budget has no fixed count");
    }
    return *count_;
}

std::string Steps::to_string() const { return count_ ? std::to_string(*count_) : std::string("dynamic"); }

Steps Steps::parse(const std::string& text) {
    if (text == "dynamic" || text == "Dynamic") {
        return dynamic();
    }
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw InvalidInput(fmt::format("bad step value '{}'", text));
    }
    return Steps(v);
}

nlohmann::json Steps::to_json() const { return count_ ? nlohmann::json(*count_) : nlohmann::json("dynamic"); }

Steps Steps::from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s != "dynamic") {
            throw InvalidInput(fmt::format("bad step value '{}'", s));
        }
        return dynamic();
    }
    if (j.is_number_integer()) {
        return Steps(j.get<int>());
    }
    throw InvalidInput("steps must be an integer or \"dynamic\"");
}

std::strong_ordering operator<=>(const Steps& a, const Steps& b) {
    if (a.count_ && b.count_) {
        return *a.count_ <=> *b.count_;
    }
    if (!a.count_ && !b.count_) {
        return std::strong_ordering::equal;
    }
    return a.count_ ? std::strong_ordering::less : std::strong_ordering::greater;
}

std::string format_cfg(double cfg) { return fmt::format("{}", cfg); }

std::string RunKey::to_string() const {
    return fmt::format("{}|cfg={}|steps={}|{}|seed={}", model, format_cfg(cfg), steps.to_string(), dataset, seed);
}

RunKey RunKey::parse(const std::string& text) {
    const auto parts = split(text, '|');
    if (parts.size() != 5) {
        throw InvalidInput(fmt::format("run key '{}': expected 5 '|'-separated fields", text));
    }
    RunKey k;
    k.model = parts[0];
    k.cfg = parse_double(strip_prefix(parts[1], "cfg=", text), text);
    k.steps = Steps::parse(strip_prefix(parts[2], "steps=", text));
    k.dataset = parts[3];
    const auto seed = strip_prefix(parts[4], "seed=", text);
    try {
        k.seed = std::stoll(seed);
    } catch (const std::exception&) {
        throw InvalidInput(fmt::format("run key '{}': bad seed", text));
    }
    if (k.model.empty() || k.dataset.empty()) {
        throw InvalidInput(fmt::format("run key '{}': empty model or dataset", text));
    }
    return k;
}

std::string RunKey::dir_name() const {
    std::string out;
    bool lossy = model.find("__") != std::string::npos || dataset.find("__") != std::string::npos;
    for (char c : fmt::format("{}__cfg{}__steps{}__{}__seed{}", model, format_cfg(cfg), steps.to_string(), dataset, seed)) {
        const auto u = static_cast<unsigned char>(c);
        const bool keep = std::isalnum(u) || c == '.' || c == '_' || c == '-';
        lossy = lossy || !keep;
        out += keep ? c : '_';
    }
    // Replaced characters could make two keys share a directory.
    if (lossy) {
        out += "__" + util::sha256_hex(to_string()).substr(0, 8);
    }
    return out;
}

nlohmann::json RunKey::to_json() const {
    return {{"model", model}, {"cfg", cfg}, {"steps", steps.to_json()}, {"dataset", dataset}, {"seed", seed}};
}

RunKey RunKey::from_json(const nlohmann::json& j) {
    RunKey k;
    try {
        k.model = j.at("model").get<std::string>();
        k.cfg = j.at("cfg").get<double>();
        k.steps = Steps::from_json(j.at("steps"));
        k.dataset = j.at("dataset").get<std::string>();
        k.seed = j.at("seed").get<long long>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(fmt::format("run key json: {}", e.what()));
    }
    return k;
}

std::strong_ordering operator<=>(const RunKey& a, const RunKey& b) {
    if (auto c = a.model <=> b.model; c != 0) {
        return c;
    }
    if (a.cfg != b.cfg) {
        return a.cfg < b.cfg ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (auto c = a.steps <=> b.steps; c != 0) {
        return c;
    }
    if (auto c = a.dataset <=> b.dataset; c != 0) {
        return c;
    }
    return a.seed <=> b.seed;
}

bool operator==(const RunKey& a, const RunKey& b) { return (a <=> b) == std::strong_ordering::equal; }

}  // namespace genbench
