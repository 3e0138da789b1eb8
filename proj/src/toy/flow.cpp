#include "genbench/toy/flow.hpp"

#include <cmath>
#include <random>
#include <set>

#include <fmt/format.h>

#include "genbench/metrics/frechet.hpp"
#include "genbench/util/error.hpp"
#include "genbench/util/files.hpp"

namespace genbench::toy {

ToyConfig::ToyConfig(std::vector<ToyClassSpec> classes) : classes_(std::move(classes)) {
    if (classes_.empty()) {
        throw ConfigError("toy config: no classes");
    }
    std::set<int> ids;
    std::set<std::string> names;
    double weight_sum = 0.0;
    for (const auto& c : classes_) {
        if (!(c.scale > 0.0) || !std::isfinite(c.scale)) {
            throw ConfigError(fmt::format("toy config: class {} scale must be positive", c.class_id));
        }
        if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
            throw ConfigError(fmt::format("toy config: class {} weight must be positive", c.class_id));
        }
        if (!std::isfinite(c.mean[0]) || !std::isfinite(c.mean[1])) {
            throw ConfigError(fmt::format("toy config: class {} mean must be finite", c.class_id));
        }
        if (c.name.empty()) {
            throw ConfigError(fmt::format("toy config: class {} has an empty name", c.class_id));
        }
        if (!ids.insert(c.class_id).second) {
            throw ConfigError(fmt::format("toy config: duplicate class_id {}", c.class_id));
        }
        if (!names.insert(c.name).second) {
            throw ConfigError(fmt::format("toy config: duplicate class name '{}'", c.name));
        }
        weight_sum += c.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9) {
        throw ConfigError(fmt::format("toy config: weights sum to {}, expected 1", weight_sum));
    }

    Vec2 mean{0.0, 0.0};
    for (const auto& c : classes_) {
        mean[0] += c.weight * c.mean[0];
        mean[1] += c.weight * c.mean[1];
    }
    double total_variance = 0.0;
    for (const auto& c : classes_) {
        const double dx = c.mean[0] - mean[0];
        const double dy = c.mean[1] - mean[1];
        total_variance += c.weight * (2.0 * c.scale * c.scale + dx * dx + dy * dy);
    }
    unconditional_.class_id = -1;
    unconditional_.name = "unconditional";
    unconditional_.mean = mean;
    unconditional_.scale = std::sqrt(total_variance / 2.0);
    unconditional_.weight = 1.0;
}

ToyConfig ToyConfig::from_json(const nlohmann::json& j) {
    std::vector<ToyClassSpec> classes;
    try {
        for (const auto& c : j.at("classes")) {
            if (c.contains("cov")) {
                throw ConfigError("toy config: only isotropic targets are supported ('cov' given)");
            }
            ToyClassSpec spec;
            spec.class_id = c.at("class_id").get<int>();
            spec.name = c.at("name").get<std::string>();
            const auto mean = c.at("mean").get<std::vector<double>>();
            if (mean.size() != 2) {
                throw ConfigError(fmt::format("toy config: class {} mean must have 2 entries", spec.class_id));
            }
            spec.mean = {mean[0], mean[1]};
            const auto& scale = c.at("scale");
            if (scale.is_array()) {
                const auto s = scale.get<std::vector<double>>();
                if (s.size() != 2) {
                    throw ConfigError(fmt::format("toy config: class {} scale must have 2 entries", spec.class_id));
                }
                if (s[0] != s[1]) {
                    throw ConfigError(fmt::format("toy config: class {} is anisotropic ({} vs {})", spec.class_id, s[0], s[1]));
                }
                spec.scale = s[0];
            } else {
                spec.scale = scale.get<double>();
            }
            spec.weight = c.at("weight").get<double>();
            classes.push_back(std::move(spec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("toy config: {}", e.what()));
    }
    return ToyConfig(std::move(classes));
}

ToyConfig ToyConfig::load(const std::filesystem::path& path) { return from_json(util::read_json(path)); }

nlohmann::json ToyConfig::to_json() const {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& c : classes_) {
        classes.push_back({{"class_id", c.class_id},
                           {"name", c.name},
                           {"mean", {c.mean[0], c.mean[1]}},
                           {"scale", c.scale},
                           {"weight", c.weight}});
    }
    return {{"classes", classes}};
}

const ToyClassSpec& ToyConfig::at(int class_id) const { return classes_[index_of(class_id)]; }

std::size_t ToyConfig::index_of(int class_id) const {
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        if (classes_[i].class_id == class_id) {
            return i;
        }
    }
    throw InvalidInput(fmt::format("toy config: unknown class_id {}", class_id));
}

Vec2 conditional_velocity(const Vec2& x, double t, const ToyClassSpec& spec) {
    if (!(t < 1.0) || t < 0.0) {
        throw InvalidInput(fmt::format("velocity: t must lie in [0, 1), got {}", t));
    }
    const double s2 = spec.scale * spec.scale;
    const double sigma = std::sqrt((1.0 - t) * (1.0 - t) + t * t * s2);
    const double sigma_dot = (-(1.0 - t) + t * s2) / sigma;
    const double gain = sigma_dot / sigma;
    return {gain * (x[0] - t * spec.mean[0]) + spec.mean[0], gain * (x[1] - t * spec.mean[1]) + spec.mean[1]};
}

Vec2 cfg_velocity(const Vec2& x, double t, double w, const ToyClassSpec& cond, const ToyClassSpec& uncond) {
    if (w == 1.0) {
        return conditional_velocity(x, t, cond);
    }
    if (w == 0.0) {
        return conditional_velocity(x, t, uncond);
    }
    const Vec2 vc = conditional_velocity(x, t, cond);
    const Vec2 vu = conditional_velocity(x, t, uncond);
    return {vu[0] + w * (vc[0] - vu[0]), vu[1] + w * (vc[1] - vu[1])};
}

Vec2 initial_noise(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double a = normal(rng);
    const double b = normal(rng);
    return {a, b};
}

Vec2 integrate(const Vec2& x0, int n_steps, double w, const ToyClassSpec& cond, const ToyClassSpec& uncond) {
    if (n_steps < 1) {
        throw InvalidInput(fmt::format("euler: n_steps must be >= 1, got {}", n_steps));
    }
    if (!(w >= 0.0) || !std::isfinite(w)) {
        throw InvalidInput(fmt::format("euler: guidance weight must be >= 0, got {}", w));
    }
    const double dt = 1.0 / static_cast<double>(n_steps);
    Vec2 x = x0;
    for (int k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(n_steps);
        const Vec2 v = cfg_velocity(x, t, w, cond, uncond);
        x[0] += dt * v[0];
        x[1] += dt * v[1];
    }
    return x;
}

std::vector<Vec2> euler_sample(const ToyConfig& config, int class_id, int n_steps, std::size_t n_samples, double w,
                               std::uint64_t seed, std::uint64_t first_index) {
    const auto& cond = config.at(class_id);
    std::vector<Vec2> out;
    out.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        out.push_back(integrate(initial_noise(seed, first_index + i), n_steps, w, cond, config.unconditional()));
    }
    return out;
}

metrics::GaussianStats sample_stats(const std::vector<Vec2>& samples) {
    metrics::StatsAccumulator acc(2);
    for (const auto& s : samples) {
        acc.add_row(s);
    }
    return acc.finalize();
}

double analytic_frechet(const ToyClassSpec& spec, const metrics::GaussianStats& empirical) {
    if (empirical.dim() != 2) {
        throw DimensionMismatch(fmt::format("analytic_frechet: expected 2-D stats, got {}", empirical.dim()));
    }
    metrics::GaussianStats target;
    target.n = empirical.n;
    target.mean = Eigen::Vector2d(spec.mean[0], spec.mean[1]);
    target.cov = Eigen::Matrix2d::Identity() * (spec.scale * spec.scale);
    return metrics::frechet_distance(target, empirical);
}

int nfe_for(int n_steps, double w) { return w == 1.0 ? n_steps : 2 * n_steps; }

}  // namespace genbench::toy
