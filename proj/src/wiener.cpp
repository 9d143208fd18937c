#include "rcsep/wiener.hpp"

#include "rcsep/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace rcsep {

double SpectrumEstimate::frequency(std::size_t k) const {
    const auto kk = static_cast<double>(k);
    const auto l = static_cast<double>(seg_len);
    return (2 * k <= seg_len ? kk : kk - l) * bin_width();
}

std::vector<double> SpectrumEstimate::one_sided_real() const {
    const std::size_t half = seg_len / 2;
    std::vector<double> out(half + 1);
    for (std::size_t k = 0; k <= half; ++k) {
        const bool unpaired = k == 0 || (seg_len % 2 == 0 && k == half);
        out[k] = values[k].real() * (unpaired ? 1.0 : 2.0);
    }
    return out;
}

std::vector<double> hann_window(std::size_t length) {
    if (length < 2) throw InvalidArgument("hann_window: length must be >= 2");
    std::vector<double> w(length);
    const double denom = static_cast<double>(length - 1);
    for (std::size_t n = 0; n < length; ++n) {
        w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / denom));
    }
    // Pin the symmetric points the cosine only approximates.
    w.front() = 0.0;
    w.back() = 0.0;
    if (length % 2 == 1) w[length / 2] = 1.0;
    return w;
}

namespace {

SpectrumEstimate welch_impl(const TimeSeries& x, const TimeSeries* y, std::size_t seg_len, std::size_t overlap) {
    if (seg_len < 2) throw InvalidArgument("welch: segment length must be >= 2");
    if (overlap >= seg_len) throw InvalidArgument("welch: overlap must be smaller than the segment length");
    if (y && y->size() != x.size()) throw InvalidArgument("welch: series lengths differ");
    if (y && y->dt != x.dt) throw InvalidArgument("welch: sample intervals differ");
    if (x.size() < seg_len) {
        throw InvalidArgument("welch: series of length " + std::to_string(x.size()) +
                              " is shorter than one segment (" + std::to_string(seg_len) + ")");
    }

    const std::vector<double> window = hann_window(seg_len);
    double window_power = 0.0;
    for (double v : window) window_power += v * v;

    const Dft dft(seg_len);
    const std::size_t hop = seg_len - overlap;
    std::vector<Complex> bx(seg_len), by(seg_len), fx(seg_len), fy(seg_len);

    SpectrumEstimate est;
    est.seg_len = seg_len;
    est.dt = x.dt;
    est.values.assign(seg_len, Complex{});
    for (std::size_t start = 0; start + seg_len <= x.size(); start += hop) {
        for (std::size_t n = 0; n < seg_len; ++n) bx[n] = window[n] * x.samples[start + n];
        dft.forward(bx, fx);
        if (y) {
            for (std::size_t n = 0; n < seg_len; ++n) by[n] = window[n] * y->samples[start + n];
            dft.forward(by, fy);
            for (std::size_t k = 0; k < seg_len; ++k) est.values[k] += std::conj(fx[k]) * fy[k];
        } else {
            for (std::size_t k = 0; k < seg_len; ++k) est.values[k] += std::norm(fx[k]);
        }
        ++est.segments;
    }
    const double scale = x.dt / (window_power * static_cast<double>(est.segments));
    for (Complex& v : est.values) v *= scale;
    return est;
}

} // namespace

SpectrumEstimate welch_csd(const TimeSeries& x, const TimeSeries& y, std::size_t seg_len, std::size_t overlap) {
    return welch_impl(x, &y, seg_len, overlap);
}

SpectrumEstimate welch_psd(const TimeSeries& x, std::size_t seg_len, std::size_t overlap) {
    return welch_impl(x, nullptr, seg_len, overlap);
}

SpectrumEstimate wiener_transfer(const SpectrumEstimate& p_us, const SpectrumEstimate& p_uu, double floor_rel) {
    if (p_us.size() != p_uu.size() || p_us.seg_len != p_uu.seg_len) {
        throw InvalidArgument("wiener_transfer: spectra live on different grids");
    }
    double peak = 0.0;
    for (const Complex& v : p_uu.values) peak = std::max(peak, v.real());
    const double floor = floor_rel * peak;

    SpectrumEstimate h = p_us;
    for (std::size_t k = 0; k < h.size(); ++k) {
        const double denom = std::max(p_uu.values[k].real(), floor);
        h.values[k] = denom > 0.0 ? p_us.values[k] / denom : Complex{};
    }
    return h;
}

WienerFilter impulse_response(const SpectrumEstimate& transfer) {
    const std::size_t l = transfer.size();
    if (l == 0 || l != transfer.seg_len) throw InvalidArgument("impulse_response: empty or inconsistent grid");

    double scale = 0.0;
    for (const Complex& v : transfer.values) scale = std::max(scale, std::abs(v));
    const double tol = 1e-9 * std::max(scale, 1.0);
    for (std::size_t k = 0; k < l; ++k) {
        if (std::abs(transfer.values[k] - std::conj(transfer.values[(l - k) % l])) > tol) {
            throw InvalidArgument("impulse_response: transfer function is not Hermitian at bin " + std::to_string(k));
        }
    }

    const std::vector<Complex> circ = Dft(l).inverse(transfer.values);
    WienerFilter f;
    f.seg_len = l;
    f.h.resize(l);
    const std::size_t c = f.center();
    for (std::size_t j = 0; j < l; ++j) {
        const Complex v = circ[(j + l - c) % l];
        if (std::abs(v.imag()) > 1e-10 * std::max(scale, 1.0)) {
            throw NumericalError("impulse_response: imaginary residue " + std::to_string(v.imag()) + " is not negligible");
        }
        f.h[j] = v.real();
    }
    return f;
}

TimeSeries apply(const WienerFilter& f, const TimeSeries& u) {
    if (f.h.size() != f.seg_len || f.h.empty()) throw InvalidArgument("apply: malformed filter");
    if (u.size() < f.seg_len) {
        throw InvalidArgument("apply: series length " + std::to_string(u.size()) + " is shorter than the filter (" +
                              std::to_string(f.seg_len) + ")");
    }
    const auto n = static_cast<long>(u.size());
    const auto c = static_cast<long>(f.center());
    const auto l = static_cast<long>(f.seg_len);

    TimeSeries out;
    out.dt = u.dt;
    out.samples.assign(u.size(), 0.0);
    // y[t] = sum_j h[j] u[t - (j - c)]
    for (long t = 0; t < n; ++t) {
        const long j_lo = std::max(0L, t + c - (n - 1));
        const long j_hi = std::min(l - 1, t + c);
        double acc = 0.0;
        for (long j = j_lo; j <= j_hi; ++j) acc += f.h[static_cast<std::size_t>(j)] * u.samples[static_cast<std::size_t>(t + c - j)];
        out.samples[static_cast<std::size_t>(t)] = acc;
    }
    return out;
}

WienerFilter build_wiener(const TimeSeries& u_train, const TimeSeries& s_train, std::size_t seg_len,
                          std::size_t overlap) {
    const SpectrumEstimate p_us = welch_csd(u_train, s_train, seg_len, overlap);
    const SpectrumEstimate p_uu = welch_psd(u_train, seg_len, overlap);
    return impulse_response(wiener_transfer(p_us, p_uu));
}

void write_filter_csv(const WienerFilter& f, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_filter_csv: cannot open " + path.string());
    char buf[64];
    out << "lag,h\n";
    for (std::size_t j = 0; j < f.h.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", f.h[j]);
        out << f.lag(j) << ',' << buf << '\n';
    }
    if (!out) throw IoError("write_filter_csv: write failed");
}

void write_spectra_csv(const std::vector<std::string>& names, const std::vector<SpectrumEstimate>& spectra,
                       const std::filesystem::path& path) {
    if (names.size() != spectra.size() || spectra.empty()) throw InvalidArgument("write_spectra_csv: bad arguments");
    std::vector<std::vector<double>> columns;
    for (const auto& s : spectra) {
        if (s.seg_len != spectra.front().seg_len || s.dt != spectra.front().dt) {
            throw InvalidArgument("write_spectra_csv: spectra live on different grids");
        }
        columns.push_back(s.one_sided_real());
    }
    std::ofstream out(path);
    if (!out) throw IoError("write_spectra_csv: cannot open " + path.string());
    out << "frequency";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    char buf[64];
    for (std::size_t k = 0; k < columns.front().size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", spectra.front().frequency(k));
        out << buf;
        for (const auto& col : columns) {
            std::snprintf(buf, sizeof buf, "%.17g", col[k]);
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw IoError("write_spectra_csv: write failed");
}

} // namespace rcsep
