#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "genbench/metrics/gaussian.hpp"

namespace genbench::toy {

using Vec2 = std::array<double, 2>;

/// Isotropic Gaussian target N(mean, scale² I) for one class.
struct ToyClassSpec {
    int class_id = 0;
    std::string name;
    Vec2 mean{0.0, 0.0};
    double scale = 1.0;
    double weight = 1.0;
};

/// The class mixture plus its moment-matched unconditional target.
class ToyConfig {
public:
    /// Validates scale > 0, positive weights summing to 1 within 1e-9, unique ids/names.
    explicit ToyConfig(std::vector<ToyClassSpec> classes);

    /// Parses {classes:[{class_id, name, mean:[x,y], scale, weight}]}. `scale`
    /// may be given as [sx, sy]; unequal entries (anisotropic targets) are rejected.
    static ToyConfig from_json(const nlohmann::json& j);
    static ToyConfig load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    const std::vector<ToyClassSpec>& classes() const noexcept { return classes_; }
    const ToyClassSpec& at(int class_id) const;
    std::size_t index_of(int class_id) const;

    /// Mean = weighted class means; scale² = (mixture total variance) / 2.
    const ToyClassSpec& unconditional() const noexcept { return unconditional_; }

private:
    std::vector<ToyClassSpec> classes_;
    ToyClassSpec unconditional_;
};

/// Marginal velocity of the linear interpolant x_t = (1-t) x0 + t x1 with
/// x0 ~ N(0, I) and x1 ~ N(m, s² I):
///   σ_t = sqrt((1-t)² + t² s²),  σ̇_t = (-(1-t) + t s²) / σ_t,
///   v = (σ̇_t / σ_t)(x - t m) + m.
/// Requires t < 1.
Vec2 conditional_velocity(const Vec2& x, double t, const ToyClassSpec& spec);

/// Guided field v_u + w (v_c - v_u); w = 1 returns the conditional field and
/// w = 0 the unconditional field, both bit-for-bit.
Vec2 cfg_velocity(const Vec2& x, double t, double w, const ToyClassSpec& cond, const ToyClassSpec& uncond);

/// Standard normal start point for sample `index` under `seed`; counter based,
/// so results do not depend on how samples are spread over workers.
Vec2 initial_noise(std::uint64_t seed, std::uint64_t index);

/// Left-endpoint Euler on t_k = k / n_steps from x0 = initial_noise(seed, index).
Vec2 integrate(const Vec2& x0, int n_steps, double w, const ToyClassSpec& cond, const ToyClassSpec& uncond);

/// n_samples trajectories for one class; sample i uses initial_noise(seed, first_index + i).
std::vector<Vec2> euler_sample(const ToyConfig& config, int class_id, int n_steps, std::size_t n_samples, double w,
                               std::uint64_t seed, std::uint64_t first_index = 0);

/// Stats of a sample set (n >= 2).
metrics::GaussianStats sample_stats(const std::vector<Vec2>& samples);

/// Fréchet distance between the analytic target N(m, s² I) and empirical stats.
double analytic_frechet(const ToyClassSpec& spec, const metrics::GaussianStats& empirical);

/// Guided steps cost two field evaluations, unguided steps one.
int nfe_for(int n_steps, double w);

}  // namespace genbench::toy
