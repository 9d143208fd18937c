#pragma once

// Normalized separation error and spectral comparison.

#include "rcsep/dynsys.hpp"
#include "rcsep/wiener.hpp"

#include <optional>
#include <string>

namespace rcsep {

/// E = <(s1 - s_hat)^2> / min_zeta <(s1 - zeta u)^2>.
struct ErrorReport {
    std::optional<double> e_normalized;  // empty when the denominator vanishes
    double e_numerator = 0.0;
    double denominator = 0.0;
    double zeta_star = 0.0;
    std::size_t n_samples = 0;
    std::string tag;
};

/// zeta* = <s1 u> / <u^2>.
double optimal_zeta(const TimeSeries& s1, const TimeSeries& u);

struct ErrorWindow {
    /// Samples dropped from each end before averaging (e.g. filter edges).
    std::size_t exclude_edges = 0;
};

ErrorReport normalized_error(const TimeSeries& s1, const TimeSeries& s_hat, const TimeSeries& u,
                             const std::string& tag = {}, const ErrorWindow& window = {});

struct PsdOverlay {
    SpectrumEstimate first;
    SpectrumEstimate second;
    /// <P1, P2> / (|P1| |P2|) over the one-sided grid.
    double overlap_score = 0.0;
};

PsdOverlay psd_overlay(const TimeSeries& z1, const TimeSeries& z2, std::size_t seg_len = kDefaultSegmentLength);

} // namespace rcsep
