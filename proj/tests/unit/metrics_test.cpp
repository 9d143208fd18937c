#include <doctest.h>

#include "rcsep/dynsys.hpp"
#include "rcsep/error.hpp"
#include "rcsep/metrics.hpp"
#include "rcsep/random.hpp"

#include <cmath>

using namespace rcsep;

namespace {

TimeSeries series(std::vector<double> v) {
    TimeSeries s;
    s.samples = std::move(v);
    return s;
}

TimeSeries noise(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    TimeSeries s;
    for (std::size_t i = 0; i < n; ++i) s.samples.push_back(rng.uniform(-1.0, 1.0));
    return s;
}

double mean_square(const TimeSeries& a, const TimeSeries& b, double zeta) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - zeta * b[i]) * (a[i] - zeta * b[i]);
    return acc / static_cast<double>(a.size());
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("optimal_zeta matches a grid search") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const TimeSeries s1 = noise(2000, seed);
        const TimeSeries s2 = noise(2000, seed + 10);
        const TimeSeries u = mix(s1, s2, {0.3 + 0.2 * static_cast<double>(seed)});
        const double zeta = optimal_zeta(s1, u);
        double best = 0.0;
        double best_err = INFINITY;
        for (int i = -2000; i <= 2000; ++i) {
            const double z = i * 1e-3;
            const double err = mean_square(s1, u, z);
            if (err < best_err) {
                best_err = err;
                best = z;
            }
        }
        CHECK(std::abs(zeta - best) <= 1e-3);
    }
}

TEST_CASE("denominator approaches 1 - alpha for independent unit signals") {
    const auto a = generate(LorenzParams{}, perturbed_initial_state(1), 50000);
    const auto b = generate(LorenzParams{}.scaled(1.2), perturbed_initial_state(2), 50000);
    const TimeSeries s1 = normalize(a[0]);
    const TimeSeries s2 = normalize(b[0]);
    for (double alpha : {0.1, 0.5, 0.9}) {
        CAPTURE(alpha);
        const TimeSeries u = mix(s1, s2, {alpha});
        const ErrorReport rep = normalized_error(s1, u, u);
        CHECK(std::abs(rep.denominator - (1.0 - alpha)) < 0.05);
        CHECK(std::abs(rep.zeta_star - std::sqrt(alpha)) < 0.05);
    }
}

TEST_CASE("normalized error values") {
    const TimeSeries s1 = noise(1000, 4);
    const TimeSeries u = mix(s1, noise(1000, 5), {0.5});

    const ErrorReport perfect = normalized_error(s1, s1, u, "rc");
    CHECK(perfect.tag == "rc");
    CHECK(perfect.e_numerator == 0.0);
    REQUIRE(perfect.e_normalized);
    CHECK(*perfect.e_normalized == 0.0);
    CHECK(perfect.n_samples == 1000);

    // The best scalar multiple of u scores exactly 1.
    TimeSeries scaled = u;
    const double zeta = optimal_zeta(s1, u);
    for (double& v : scaled.samples) v *= zeta;
    CHECK(*normalized_error(s1, scaled, u).e_normalized == doctest::Approx(1.0).epsilon(1e-12));

    // Any other multiple scores higher.
    for (double& v : scaled.samples) v *= 1.1;
    CHECK(*normalized_error(s1, scaled, u).e_normalized > 1.0);
}

TEST_CASE("alpha = 1 leaves E undefined") {
    const TimeSeries s1 = noise(500, 6);
    const ErrorReport rep = normalized_error(s1, noise(500, 7), s1);
    CHECK_FALSE(rep.e_normalized.has_value());
    CHECK(rep.e_numerator > 0.0);
}

TEST_CASE("edge exclusion") {
    const TimeSeries s1 = series({100.0, 1.0, 2.0, -100.0});
    const TimeSeries s_hat = series({0.0, 1.0, 2.0, 0.0});
    const TimeSeries u = series({1.0, 1.0, 1.0, 1.0});
    const ErrorReport rep = normalized_error(s1, s_hat, u, {}, {1});
    CHECK(rep.n_samples == 2);
    CHECK(rep.e_numerator == 0.0);
    CHECK(rep.zeta_star == doctest::Approx(1.5));
    CHECK_THROWS_AS(normalized_error(s1, s_hat, u, {}, {2}), InvalidArgument);
}

TEST_CASE("alignment checks") {
    const TimeSeries a = series({1.0, 2.0});
    CHECK_THROWS_AS(normalized_error(a, series({1.0}), a), InvalidArgument);
    CHECK_THROWS_AS(optimal_zeta(a, series({0.0, 0.0})), InvalidArgument);
    CHECK_THROWS_AS(optimal_zeta(series({}), series({})), InvalidArgument);
    TimeSeries b = a;
    b.dt = 0.1;
    CHECK_THROWS_AS(optimal_zeta(a, b), InvalidArgument);
}

TEST_CASE("PSD overlap") {
    const auto a = generate(LorenzParams{}, perturbed_initial_state(3), 20000);
    const PsdOverlay same = psd_overlay(a[2], a[2]);
    CHECK(same.overlap_score == doctest::Approx(1.0).epsilon(1e-12));

    // x and z of the same attractor have very different spectra.
    const PsdOverlay different = psd_overlay(normalize(a[0]), normalize(a[2]));
    CHECK(different.overlap_score < same.overlap_score);
    CHECK(different.overlap_score > 0.0);
    CHECK(same.first.seg_len == kDefaultSegmentLength);
}

}
