#include <doctest.h>

#include "rcsep/dynsys.hpp"
#include "rcsep/error.hpp"

#include <cmath>

using namespace rcsep;

namespace {

double max_diff(const Vec3& a, const Vec3& b) {
    double m = 0.0;
    for (int i = 0; i < 3; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

Vec3 fine_reference(Vec3 s, const LorenzParams& p, double h, int substeps) {
    for (int i = 0; i < substeps; ++i) s = rk4_step(s, p, h / substeps);
    return s;
}

double mean_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

TimeSeries series(std::vector<double> v) {
    TimeSeries s;
    s.samples = std::move(v);
    return s;
}

} // namespace

TEST_SUITE("dynsys") {

TEST_CASE("lorenz_deriv at the origin and at (1,1,1)") {
    const LorenzParams p;
    CHECK(lorenz_deriv({0, 0, 0}, p) == Vec3{0, 0, 0});
    const Vec3 d = lorenz_deriv({1, 1, 1}, p);
    CHECK(d[0] == 0.0);
    CHECK(d[1] == 26.0);
    CHECK(d[2] == doctest::Approx(1.0 - 8.0 / 3.0).epsilon(1e-15));

    const Vec3 d2 = lorenz_deriv({1, 1, 1}, p.with_speed(2.0));
    for (int i = 0; i < 3; ++i) CHECK(d2[i] == 2.0 * d[i]);
}

TEST_CASE("scaling touches sigma, rho, beta but not speed") {
    const LorenzParams p = LorenzParams::classical().with_speed(0.9).scaled(1.2);
    CHECK(p.sigma == doctest::Approx(12.0));
    CHECK(p.rho == doctest::Approx(33.6));
    CHECK(p.beta == doctest::Approx(3.2));
    CHECK(p.speed == 0.9);
}

TEST_CASE("rk4_step against a fine-step reference") {
    const LorenzParams p;
    CHECK(rk4_step({0, 0, 0}, p, 0.01) == Vec3{0, 0, 0});

    const Vec3 coarse = rk4_step({1, 1, 1}, p, 0.01);
    const Vec3 fine = fine_reference({1, 1, 1}, p, 0.01, 100);
    CHECK(max_diff(coarse, fine) < 1e-5);

    SUBCASE("fourth order: halving h cuts the one-step error about 16x") {
        const Vec3 start{-5.0, 3.0, 20.0};
        const double e1 = max_diff(rk4_step(start, p, 0.02), fine_reference(start, p, 0.02, 400));
        const double e2 = max_diff(rk4_step(start, p, 0.01), fine_reference(start, p, 0.01, 200));
        const double ratio = e1 / e2;
        CHECK(ratio > 24.0);  // local error is O(h^5): ideal ratio 32
        CHECK(ratio < 40.0);
    }

    SUBCASE("speed 2 with h/2 equals speed 1 with h") {
        const Vec3 a = rk4_step({1, 1, 1}, p.with_speed(2.0), 0.005);
        const Vec3 b = rk4_step({1, 1, 1}, p, 0.01);
        CHECK(max_diff(a, b) < 1e-8);
    }
}

TEST_CASE("generate returns three series with the requested length") {
    const auto xyz = generate(LorenzParams{}, {1, 1, 1}, 100);
    for (const auto& s : xyz) {
        CHECK(s.size() == 100);
        CHECK(s.dt == doctest::Approx(0.05));
    }
}

TEST_CASE("generate samples every fifth RK4 step after the transient") {
    const LorenzParams p;
    GenerateOptions opts;
    opts.transient_steps = 7;
    const auto xyz = generate(p, {1, 2, 3}, 3, opts);
    Vec3 s{1, 2, 3};
    for (int i = 0; i < 7; ++i) s = rk4_step(s, p, kIntegrationStep);
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < kStepsPerSample; ++i) s = rk4_step(s, p, kIntegrationStep);
        CHECK(xyz[0][k] == s[0]);
        CHECK(xyz[1][k] == s[1]);
        CHECK(xyz[2][k] == s[2]);
    }
}

TEST_CASE("generate is deterministic and seeds decorrelate initial states") {
    const auto a = generate(LorenzParams{}, perturbed_initial_state(3), 500);
    const auto b = generate(LorenzParams{}, perturbed_initial_state(3), 500);
    CHECK(a[0].samples == b[0].samples);
    CHECK(a[2].samples == b[2].samples);

    const Vec3 i1 = perturbed_initial_state(1);
    const Vec3 i2 = perturbed_initial_state(2);
    CHECK(max_diff(i1, i2) > 0.0);
    for (double v : i1) CHECK(std::abs(v - 1.0) <= 0.5);
}

TEST_CASE("classical Lorenz z has mean near 23.5") {
    const auto xyz = generate(LorenzParams{}, perturbed_initial_state(11), 40000);
    const double zm = mean_of(xyz[2].samples);
    CHECK(zm > 20.0);
    CHECK(zm < 27.0);
}

TEST_CASE("speed rescales time") {
    // Speed 2 with step h is speed 1 with step 2h, so a speed-2 trajectory
    // sampled every dt equals a speed-1 trajectory integrated with doubled steps.
    GenerateOptions opts;
    opts.transient_steps = 0;
    const auto fast = generate(LorenzParams{}.with_speed(2.0), {1, 1, 1}, 10, opts);
    Vec3 s{1, 1, 1};
    for (std::size_t k = 0; k < 10; ++k) {
        for (int i = 0; i < kStepsPerSample; ++i) s = rk4_step(s, LorenzParams{}, 2.0 * kIntegrationStep);
        CHECK(std::abs(fast[0][k] - s[0]) < 1e-9);
    }
}

TEST_CASE("generate rejects bad input and divergence") {
    CHECK_THROWS_AS(generate(LorenzParams{}, {1, 1, 1}, 0), InvalidArgument);
    CHECK_THROWS_AS(generate(LorenzParams{}.with_speed(0.0), {1, 1, 1}, 10), InvalidArgument);
    GenerateOptions opts;
    opts.divergence_bound = 5.0;
    CHECK_THROWS_AS(generate(LorenzParams{}, {1, 1, 1}, 100, opts), NumericalError);
}

TEST_CASE("normalize") {
    SUBCASE("constant series is rejected") {
        CHECK_THROWS_AS(normalize(series({2.0, 2.0, 2.0})), InvalidArgument);
    }
    SUBCASE("(-1, 1) is already normalized") {
        const TimeSeries n = normalize(series({-1.0, 1.0}));
        CHECK(n.samples == std::vector<double>{-1.0, 1.0});
        REQUIRE(n.norm);
        CHECK(n.norm->mean == 0.0);
        CHECK(n.norm->stddev == 1.0);
    }
    SUBCASE("mean 0 and variance 1 on a Lorenz trajectory, idempotent") {
        const auto xyz = generate(LorenzParams{}, perturbed_initial_state(5), 5000);
        const TimeSeries n = normalize(xyz[0]);
        CHECK(std::abs(mean_of(n.samples)) < 1e-9);
        CHECK(std::abs(variance_of(n.samples) - 1.0) < 1e-9);
        const TimeSeries again = normalize(n);
        for (std::size_t i = 0; i < n.size(); ++i) CHECK(std::abs(again[i] - n[i]) < 1e-12);
    }
    SUBCASE("normalize_with reuses training statistics") {
        const TimeSeries s = series({1.0, 3.0, 5.0, 100.0});
        const NormStats st = compute_stats(s.view().first(3));
        const TimeSeries n = normalize_with(s, st);
        CHECK(n[0] == doctest::Approx(-std::sqrt(1.5)));
        CHECK(n[3] == doctest::Approx(97.0 / std::sqrt(8.0 / 3.0)));
    }
}

TEST_CASE("mix") {
    const TimeSeries s1 = series({1.0, -2.0, 0.5});
    const TimeSeries s2 = series({0.25, 4.0, -1.0});
    CHECK(mix(s1, s2, {0.0}).samples == s2.samples);
    CHECK(mix(s1, s2, {1.0}).samples == s1.samples);
    const TimeSeries half = mix(s1, s2, {0.5});
    for (std::size_t i = 0; i < 3; ++i) CHECK(half[i] == doctest::Approx((s1[i] + s2[i]) / std::sqrt(2.0)));

    CHECK_THROWS_AS(mix(s1, s2, {1.5}), InvalidArgument);
    CHECK_THROWS_AS(mix(s1, series({1.0}), {0.5}), InvalidArgument);
    TimeSeries other_dt = s2;
    other_dt.dt = 0.1;
    CHECK_THROWS_AS(mix(s1, other_dt, {0.5}), InvalidArgument);
}

TEST_CASE("mixture of independent Lorenz signals has unit variance") {
    const auto a = generate(LorenzParams{}, perturbed_initial_state(21), 50000);
    const auto b = generate(LorenzParams{}.scaled(1.2), perturbed_initial_state(22), 50000);
    const TimeSeries u = mix(normalize(a[0]), normalize(b[0]), {0.3});
    CHECK(std::abs(variance_of(u.samples) - 1.0) < 0.05);
}

TEST_CASE("slice keeps dt and the normalization record") {
    TimeSeries s = normalize(series({1.0, 2.0, 3.0, 4.0}));
    s.dt = 0.1;
    const TimeSeries part = s.slice(1, 2);
    CHECK(part.size() == 2);
    CHECK(part[0] == s[1]);
    CHECK(part.dt == 0.1);
    CHECK(part.norm.has_value());
    CHECK_THROWS_AS(s.slice(3, 2), InvalidArgument);
}

}
