#include <doctest.h>

#include "rcsep/error.hpp"
#include "rcsep/fft.hpp"
#include "rcsep/random.hpp"

#include <cmath>
#include <numbers>

using namespace rcsep;

namespace {

std::vector<Complex> naive_dft(const std::vector<Complex>& x) {
    const std::size_t n = x.size();
    std::vector<Complex> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        Complex acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / static_cast<double>(n);
            acc += x[j] * std::polar(1.0, angle);
        }
        out[k] = acc;
    }
    return out;
}

std::vector<Complex> random_signal(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Complex> x(n);
    for (auto& v : x) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    return x;
}

double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_SUITE("fft") {

TEST_CASE("forward matches the naive DFT for assorted lengths") {
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 12u, 30u, 97u, 125u, 250u, 500u}) {
        CAPTURE(n);
        const auto x = random_signal(n, n);
        const Dft dft(n);
        CHECK(max_abs_diff(dft.forward(x), naive_dft(x)) < 1e-10 * static_cast<double>(n));
    }
}

TEST_CASE("inverse undoes forward") {
    for (std::size_t n : {1u, 6u, 64u, 500u, 1001u}) {
        CAPTURE(n);
        const auto x = random_signal(n, 100 + n);
        const Dft dft(n);
        CHECK(max_abs_diff(dft.inverse(dft.forward(x)), x) < 1e-12);
    }
}

TEST_CASE("impulse and constant") {
    const Dft dft(10);
    std::vector<Complex> delta(10, 0.0);
    delta[0] = 1.0;
    for (const Complex& v : dft.forward(delta)) CHECK(std::abs(v - 1.0) < 1e-15);

    const std::vector<Complex> ones(10, 1.0);
    const auto spectrum = dft.forward(ones);
    CHECK(std::abs(spectrum[0] - 10.0) < 1e-12);
    for (std::size_t k = 1; k < 10; ++k) CHECK(std::abs(spectrum[k]) < 1e-12);
}

TEST_CASE("Parseval") {
    const auto x = random_signal(500, 3);
    const auto spectrum = Dft(500).forward(x);
    double time_energy = 0.0;
    double freq_energy = 0.0;
    for (const auto& v : x) time_energy += std::norm(v);
    for (const auto& v : spectrum) freq_energy += std::norm(v);
    CHECK(freq_energy / 500.0 == doctest::Approx(time_energy).epsilon(1e-12));
}

TEST_CASE("real input gives a Hermitian spectrum") {
    auto x = random_signal(250, 5);
    for (auto& v : x) v = v.real();
    const auto spectrum = Dft(250).forward(x);
    for (std::size_t k = 1; k < 250; ++k) CHECK(std::abs(spectrum[k] - std::conj(spectrum[250 - k])) < 1e-11);
}

TEST_CASE("bad lengths") {
    CHECK_THROWS_AS(Dft(0), InvalidArgument);
    const Dft dft(4);
    std::vector<Complex> in(3), out(4);
    CHECK_THROWS_AS(dft.forward(in, out), InvalidArgument);
}

}
