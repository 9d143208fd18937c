#pragma once

// Lorenz trajectories, normalization and two-component mixing.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rcsep {

using Vec3 = std::array<double, 3>;

/// Lorenz parameters plus a speed factor that multiplies the whole vector field.
struct LorenzParams {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
    double speed = 1.0;

    /// Scales (sigma, rho, beta) by c; speed is left untouched.
    LorenzParams scaled(double c) const { return {sigma * c, rho * c, beta * c, speed}; }
    LorenzParams with_speed(double s) const { return {sigma, rho, beta, s}; }

    static LorenzParams classical() { return {}; }
};

/// Mean and standard deviation removed by normalize().
struct NormStats {
    double mean = 0.0;
    double stddev = 1.0;
};

/// Uniformly sampled scalar signal.
struct TimeSeries {
    std::vector<double> samples;
    double dt = 0.05;
    std::optional<NormStats> norm;

    std::size_t size() const { return samples.size(); }
    double operator[](std::size_t i) const { return samples[i]; }
    std::span<const double> view() const { return samples; }

    /// Copy of samples [first, first + count) with the same dt and norm record.
    TimeSeries slice(std::size_t first, std::size_t count) const;
};

/// Mixing fraction alpha: u = sqrt(alpha) s1 + sqrt(1 - alpha) s2.
struct MixSpec {
    double alpha = 0.5;
};

inline constexpr double kIntegrationStep = 0.01;
inline constexpr int kStepsPerSample = 5;
inline constexpr std::size_t kDefaultTransientSteps = 1000;
inline constexpr double kDefaultDivergenceBound = 1e6;

Vec3 lorenz_deriv(const Vec3& state, const LorenzParams& p);

/// One classical fourth-order Runge-Kutta step of size h.
Vec3 rk4_step(const Vec3& state, const LorenzParams& p, double h);

struct GenerateOptions {
    /// RK4 steps integrated and thrown away before the first recorded sample.
    std::size_t transient_steps = kDefaultTransientSteps;
    double divergence_bound = kDefaultDivergenceBound;
};

/// Default initial condition (1,1,1) plus a uniform perturbation in
/// [-0.5, 0.5]^3 drawn from `seed`.
Vec3 perturbed_initial_state(std::uint64_t seed);

/// Integrates with h = 0.01 and records every 5th step (dt = 0.05).
/// Returns the x, y and z series. Throws NumericalError if any coordinate
/// leaves [-divergence_bound, divergence_bound].
std::array<TimeSeries, 3> generate(const LorenzParams& p, const Vec3& init, std::size_t n_samples,
                                   const GenerateOptions& opts = {});

/// Sample mean and (population) standard deviation.
NormStats compute_stats(std::span<const double> samples);

/// Subtracts the mean and divides by the standard deviation of `s`.
TimeSeries normalize(const TimeSeries& s);

/// Applies previously computed statistics (e.g. from a training window).
TimeSeries normalize_with(const TimeSeries& s, const NormStats& stats);

/// u = sqrt(alpha) s1 + sqrt(1 - alpha) s2. No re-normalization is applied.
TimeSeries mix(const TimeSeries& s1, const TimeSeries& s2, const MixSpec& m);

} // namespace rcsep
