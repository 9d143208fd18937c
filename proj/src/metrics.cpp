#include "rcsep/metrics.hpp"

#include "rcsep/error.hpp"

#include <cmath>

namespace rcsep {

namespace {

void check_aligned(const TimeSeries& a, const TimeSeries& b, const char* what) {
    if (a.size() != b.size()) {
        throw InvalidArgument(std::string(what) + ": series lengths differ (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
    }
    if (a.dt != b.dt) throw InvalidArgument(std::string(what) + ": sample intervals differ");
    if (a.size() == 0) throw InvalidArgument(std::string(what) + ": empty series");
}

double zeta_over(const TimeSeries& s1, const TimeSeries& u, std::size_t first, std::size_t last) {
    double su = 0.0, uu = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        su += s1.samples[i] * u.samples[i];
        uu += u.samples[i] * u.samples[i];
    }
    if (uu == 0.0) throw InvalidArgument("optimal_zeta: <u^2> is zero");
    return su / uu;
}

} // namespace

double optimal_zeta(const TimeSeries& s1, const TimeSeries& u) {
    check_aligned(s1, u, "optimal_zeta");
    return zeta_over(s1, u, 0, s1.size());
}

ErrorReport normalized_error(const TimeSeries& s1, const TimeSeries& s_hat, const TimeSeries& u,
                             const std::string& tag, const ErrorWindow& window) {
    check_aligned(s1, s_hat, "normalized_error");
    check_aligned(s1, u, "normalized_error");
    if (2 * window.exclude_edges >= s1.size()) {
        throw InvalidArgument("normalized_error: edge exclusion leaves no samples");
    }
    const std::size_t first = window.exclude_edges;
    const std::size_t last = s1.size() - window.exclude_edges;
    const auto n = static_cast<double>(last - first);

    ErrorReport rep;
    rep.tag = tag;
    rep.n_samples = last - first;
    rep.zeta_star = zeta_over(s1, u, first, last);

    double num = 0.0, den = 0.0, s1_power = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        const double e = s1.samples[i] - s_hat.samples[i];
        const double d = s1.samples[i] - rep.zeta_star * u.samples[i];
        num += e * e;
        den += d * d;
        s1_power += s1.samples[i] * s1.samples[i];
    }
    rep.e_numerator = num / n;
    rep.denominator = den / n;
    // u proportional to s1 (alpha = 1) leaves nothing to normalize by.
    if (rep.denominator > 1e-12 * (s1_power / n)) rep.e_normalized = rep.e_numerator / rep.denominator;
    return rep;
}

PsdOverlay psd_overlay(const TimeSeries& z1, const TimeSeries& z2, std::size_t seg_len) {
    if (z1.dt != z2.dt) throw InvalidArgument("psd_overlay: sample intervals differ");
    PsdOverlay out;
    out.first = welch_psd(z1, seg_len, seg_len / 2);
    out.second = welch_psd(z2, seg_len, seg_len / 2);
    const std::vector<double> p1 = out.first.one_sided_real();
    const std::vector<double> p2 = out.second.one_sided_real();
    double dot = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t k = 0; k < p1.size(); ++k) {
        dot += p1[k] * p2[k];
        n1 += p1[k] * p1[k];
        n2 += p2[k] * p2[k];
    }
    if (n1 == 0.0 || n2 == 0.0) throw InvalidArgument("psd_overlay: a spectrum is identically zero");
    out.overlap_score = dot / std::sqrt(n1 * n2);
    return out;
}

} // namespace rcsep
