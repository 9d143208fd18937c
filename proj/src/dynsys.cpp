#include "rcsep/dynsys.hpp"

#include "rcsep/error.hpp"
#include "rcsep/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rcsep {

TimeSeries TimeSeries::slice(std::size_t first, std::size_t count) const {
    if (first + count > samples.size()) {
        throw InvalidArgument("TimeSeries::slice: range [" + std::to_string(first) + ", " +
                              std::to_string(first + count) + ") exceeds length " +
                              std::to_string(samples.size()));
    }
    TimeSeries out;
    out.samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(first),
                       samples.begin() + static_cast<std::ptrdiff_t>(first + count));
    out.dt = dt;
    out.norm = norm;
    return out;
}

Vec3 lorenz_deriv(const Vec3& s, const LorenzParams& p) {
    const double x = s[0], y = s[1], z = s[2];
    return {p.speed * (p.sigma * (y - x)),
            p.speed * (-x * z + p.rho * x - y),
            p.speed * (x * y - p.beta * z)};
}

Vec3 rk4_step(const Vec3& s, const LorenzParams& p, double h) {
    auto axpy = [](const Vec3& a, double c, const Vec3& b) {
        return Vec3{a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]};
    };
    const Vec3 k1 = lorenz_deriv(s, p);
    const Vec3 k2 = lorenz_deriv(axpy(s, 0.5 * h, k1), p);
    const Vec3 k3 = lorenz_deriv(axpy(s, 0.5 * h, k2), p);
    const Vec3 k4 = lorenz_deriv(axpy(s, h, k3), p);
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
        out[i] = s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

Vec3 perturbed_initial_state(std::uint64_t seed) {
    Rng rng(seed);
    Vec3 init{1.0, 1.0, 1.0};
    for (double& c : init) c += rng.uniform(-0.5, 0.5);
    return init;
}

namespace {

void check_bounded(const Vec3& s, double bound, std::size_t step) {
    for (double c : s) {
        if (!(std::abs(c) <= bound)) {
            throw NumericalError("generate: trajectory diverged at step " + std::to_string(step) +
                                 " (|coordinate| > " + std::to_string(bound) +
                                 "); parameters are not physical for this integrator");
        }
    }
}

} // namespace

std::array<TimeSeries, 3> generate(const LorenzParams& p, const Vec3& init, std::size_t n_samples,
                                   const GenerateOptions& opts) {
    if (n_samples == 0) throw InvalidArgument("generate: n_samples must be positive");
    if (!(p.speed > 0.0)) throw InvalidArgument("generate: speed must be positive");

    const double sample_dt = kIntegrationStep * kStepsPerSample;
    std::array<TimeSeries, 3> out;
    for (auto& ts : out) {
        ts.dt = sample_dt;
        ts.samples.reserve(n_samples);
    }

    Vec3 state = init;
    std::size_t step = 0;
    for (; step < opts.transient_steps; ++step) {
        state = rk4_step(state, p, kIntegrationStep);
        check_bounded(state, opts.divergence_bound, step);
    }
    for (std::size_t n = 0; n < n_samples; ++n) {
        for (int k = 0; k < kStepsPerSample; ++k, ++step) {
            state = rk4_step(state, p, kIntegrationStep);
            check_bounded(state, opts.divergence_bound, step);
        }
        for (int c = 0; c < 3; ++c) out[c].samples.push_back(state[c]);
    }
    return out;
}

NormStats compute_stats(std::span<const double> samples) {
    if (samples.size() < 2) throw InvalidArgument("normalize: need at least 2 samples");
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var /= static_cast<double>(samples.size());
    return {mean, std::sqrt(var)};
}

TimeSeries normalize_with(const TimeSeries& s, const NormStats& stats) {
    if (!(stats.stddev > 0.0)) {
        throw InvalidArgument("normalize: series has zero variance");
    }
    TimeSeries out;
    out.dt = s.dt;
    out.norm = stats;
    out.samples.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        out.samples[i] = (s.samples[i] - stats.mean) / stats.stddev;
    }
    return out;
}

TimeSeries normalize(const TimeSeries& s) {
    const NormStats stats = compute_stats(s.samples);
    // Relative test so that huge constant offsets with rounding noise still count as constant.
    if (!(stats.stddev > 1e-14 * std::max(1.0, std::abs(stats.mean)))) {
        throw InvalidArgument("normalize: series has zero variance");
    }
    return normalize_with(s, stats);
}

TimeSeries mix(const TimeSeries& s1, const TimeSeries& s2, const MixSpec& m) {
    if (!(m.alpha >= 0.0 && m.alpha <= 1.0)) {
        throw InvalidArgument("mix: alpha must lie in [0, 1], got " + std::to_string(m.alpha));
    }
    if (s1.size() != s2.size()) {
        throw InvalidArgument("mix: length mismatch (" + std::to_string(s1.size()) + " vs " +
                              std::to_string(s2.size()) + ")");
    }
    if (s1.dt != s2.dt) throw InvalidArgument("mix: sample interval mismatch");

    const double w1 = std::sqrt(m.alpha);
    const double w2 = std::sqrt(1.0 - m.alpha);
    TimeSeries u;
    u.dt = s1.dt;
    u.samples.resize(s1.size());
    for (std::size_t i = 0; i < s1.size(); ++i) {
        u.samples[i] = w1 * s1.samples[i] + w2 * s2.samples[i];
    }
    return u;
}

} // namespace rcsep
