#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace rcsep {

using Complex = std::complex<double>;

/// Complex DFT of a fixed length, backed by FFTW plans (FFTW_ESTIMATE, so
/// the chosen algorithm and hence the rounding do not vary between runs).
/// Copies share their plans and may be used from several threads at once.
///
/// forward: X[k] = sum_n x[n] exp(-2 pi i k n / L)
/// inverse: x[n] = (1/L) sum_k X[k] exp(+2 pi i k n / L)
class Dft {
public:
    explicit Dft(std::size_t length);

    std::size_t size() const { return n_; }

    void forward(std::span<const Complex> in, std::span<Complex> out) const;
    void inverse(std::span<const Complex> in, std::span<Complex> out) const;

    std::vector<Complex> forward(std::span<const Complex> in) const;
    std::vector<Complex> inverse(std::span<const Complex> in) const;

private:
    struct Plans;
    void execute(bool forward, std::span<const Complex> in, std::span<Complex> out) const;

    std::size_t n_;
    std::shared_ptr<const Plans> plans_;
};

} // namespace rcsep
