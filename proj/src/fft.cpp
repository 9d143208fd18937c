#include "rcsep/fft.hpp"

#include "rcsep/error.hpp"

#include <fftw3.h>

#include <mutex>

namespace rcsep {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex planner_mutex;

} // namespace

struct Dft::Plans {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;

    ~Plans() {
        const std::lock_guard lock(planner_mutex);
        if (forward) fftw_destroy_plan(forward);
        if (inverse) fftw_destroy_plan(inverse);
    }
};

Dft::Dft(std::size_t length) : n_(length) {
    if (length == 0) throw InvalidArgument("Dft: length must be positive");
    auto plans = std::make_shared<Plans>();
    std::vector<Complex> a(n_), b(n_);
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    const int n = static_cast<int>(n_);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    {
        const std::lock_guard lock(planner_mutex);
        plans->forward = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, flags);
        plans->inverse = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, flags);
    }
    if (!plans->forward || !plans->inverse) throw NumericalError("Dft: FFTW could not plan length " + std::to_string(n_));
    plans_ = std::move(plans);
}

void Dft::execute(bool forward, std::span<const Complex> in, std::span<Complex> out) const {
    if (in.size() != n_ || out.size() != n_) throw InvalidArgument("Dft: buffer length mismatch");
    // Plans are out-of-place; a private copy of the input also covers aliasing.
    std::vector<Complex> src(in.begin(), in.end());
    fftw_execute_dft(forward ? plans_->forward : plans_->inverse, reinterpret_cast<fftw_complex*>(src.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

void Dft::forward(std::span<const Complex> in, std::span<Complex> out) const {
    execute(true, in, out);
}

void Dft::inverse(std::span<const Complex> in, std::span<Complex> out) const {
    execute(false, in, out);
    const double scale = 1.0 / static_cast<double>(n_);
    for (Complex& c : out) c *= scale;
}

std::vector<Complex> Dft::forward(std::span<const Complex> in) const {
    std::vector<Complex> out(n_);
    forward(in, out);
    return out;
}

std::vector<Complex> Dft::inverse(std::span<const Complex> in) const {
    std::vector<Complex> out(n_);
    inverse(in, out);
    return out;
}

} // namespace rcsep
