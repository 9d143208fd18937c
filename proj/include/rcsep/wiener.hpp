#pragma once

// Noncausal FIR Wiener filter estimated from training data with Welch
// spectra: H = P_us / P_uu, h = centered inverse DFT of H.

#include "rcsep/dynsys.hpp"
#include "rcsep/fft.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace rcsep {

inline constexpr std::size_t kDefaultSegmentLength = 500;

/// Spectral estimate on the full two-sided DFT grid of a length-L segment.
/// Bin k corresponds to frequency k / (L dt) for k <= L/2 and (k - L) / (L dt)
/// above. Densities are scaled so that sum_k P[k] * df equals the variance.
struct SpectrumEstimate {
    std::vector<Complex> values;
    std::size_t seg_len = 0;
    double dt = 1.0;
    std::size_t segments = 0;

    std::size_t size() const { return values.size(); }
    double bin_width() const { return 1.0 / (static_cast<double>(seg_len) * dt); }
    double frequency(std::size_t k) const;

    /// Real parts folded onto k = 0..L/2 (non-DC, non-Nyquist bins doubled).
    std::vector<double> one_sided_real() const;
};

struct WienerFilter {
    /// Impulse response; index seg_len / 2 is lag zero.
    std::vector<double> h;
    std::size_t seg_len = 0;

    std::size_t center() const { return seg_len / 2; }
    /// Samples at each edge of a filtered series that saw zero padding.
    std::size_t edge_margin() const { return seg_len / 2; }
    /// Lag (in samples) represented by h[j].
    long lag(std::size_t j) const { return static_cast<long>(j) - static_cast<long>(center()); }
};

/// Symmetric Hann window, w[n] = 0.5 (1 - cos(2 pi n / (L - 1))).
std::vector<double> hann_window(std::size_t length);

/// Welch cross-spectral density: average over Hann-windowed segments of
/// conj(X) Y, scaled by dt / sum(w^2).
SpectrumEstimate welch_csd(const TimeSeries& x, const TimeSeries& y, std::size_t seg_len, std::size_t overlap);

/// welch_csd(x, x); values are real and nonnegative.
SpectrumEstimate welch_psd(const TimeSeries& x, std::size_t seg_len, std::size_t overlap);

inline constexpr double kDefaultDenominatorFloor = 1e-8;

/// Pointwise P_us / P_uu, with P_uu floored at floor_rel * max(P_uu).
SpectrumEstimate wiener_transfer(const SpectrumEstimate& p_us, const SpectrumEstimate& p_uu,
                                 double floor_rel = kDefaultDenominatorFloor);

/// Inverse DFT of a Hermitian transfer function, rotated so lag zero sits
/// at seg_len / 2. Throws InvalidArgument if H is not Hermitian.
WienerFilter impulse_response(const SpectrumEstimate& transfer);

/// Same-length linear convolution with zero padding outside the series.
TimeSeries apply(const WienerFilter& f, const TimeSeries& u);

/// Welch estimates (overlap defaults to half a segment) followed by
/// transfer synthesis and impulse-response extraction.
WienerFilter build_wiener(const TimeSeries& u_train, const TimeSeries& s_train,
                          std::size_t seg_len = kDefaultSegmentLength, std::size_t overlap = kDefaultSegmentLength / 2);

/// CSV of `lag,h`.
void write_filter_csv(const WienerFilter& f, const std::filesystem::path& path);

/// CSV of `frequency,<name>...` with one-sided real spectra on a shared grid.
void write_spectra_csv(const std::vector<std::string>& names, const std::vector<SpectrumEstimate>& spectra,
                       const std::filesystem::path& path);

} // namespace rcsep
