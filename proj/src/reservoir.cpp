#include "rcsep/reservoir.hpp"

#include "rcsep/error.hpp"
#include "rcsep/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <arpack.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

namespace rcsep {

void ReservoirConfig::validate() const {
    if (n_nodes < 1) throw InvalidArgument("reservoir: n_nodes must be >= 1");
    if (!(spectral_radius > 0.0)) throw InvalidArgument("reservoir: spectral_radius must be > 0");
    if (!(leakage >= 0.0 && leakage <= 1.0)) throw InvalidArgument("reservoir: leakage must lie in [0, 1]");
    if (!(input_scale >= 0.0)) throw InvalidArgument("reservoir: input_scale must be >= 0");
    if (!(sparsity >= 0.0 && sparsity <= 1.0)) throw InvalidArgument("reservoir: sparsity must lie in [0, 1]");
    if (!std::isfinite(bias)) throw InvalidArgument("reservoir: bias must be finite");
}

std::uint64_t reservoir_identity(const ReservoirConfig& cfg, int input_dim) {
    std::uint64_t h = mix_seed(cfg.seed, 0);
    auto fold = [&h](std::uint64_t v) { h = mix_seed(h ^ v, 1); };
    fold(static_cast<std::uint64_t>(cfg.n_nodes));
    fold(static_cast<std::uint64_t>(input_dim));
    fold(std::bit_cast<std::uint64_t>(cfg.spectral_radius));
    fold(std::bit_cast<std::uint64_t>(cfg.leakage));
    fold(std::bit_cast<std::uint64_t>(cfg.input_scale));
    fold(std::bit_cast<std::uint64_t>(cfg.bias));
    fold(std::bit_cast<std::uint64_t>(cfg.sparsity));
    fold(static_cast<std::uint64_t>(cfg.washout));
    return h;
}

namespace {

// ARPACK keeps state in Fortran SAVE variables, so calls are serialized.
std::mutex arpack_mutex;

double dense_radius(const Matrix& m) {
    return Eigen::EigenSolver<Matrix>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

template <typename Mat>
double arnoldi_radius(const Mat& m, const SpectralRadiusOptions& opts) {
    const Eigen::Index n = m.rows();
    if (n == 0 || m.cols() != n) throw InvalidArgument("spectral_radius: matrix must be square and non-empty");
    if (n < std::max<Eigen::Index>(opts.dense_below, 4)) return dense_radius(Matrix(m));

    const a_int nn = static_cast<a_int>(n);
    const a_int nev = std::clamp<a_int>(opts.n_eigenvalues, 1, nn - 2);
    const a_int ncv = std::clamp<a_int>(std::max<a_int>(opts.krylov_dim, 2 * nev + 1), nev + 2, nn);
    const a_int lworkl = 3 * ncv * ncv + 6 * ncv;

    // Fixed starting vector: ARPACK's own random start depends on earlier calls.
    Rng rng(0x5eed5eedULL);
    Vector resid(n);
    for (Eigen::Index i = 0; i < n; ++i) resid(i) = rng.uniform(-1.0, 1.0);

    Matrix v(n, ncv);
    Vector workd(3 * n), workl(lworkl), workev(3 * ncv);
    Vector dr(nev + 1), di(nev + 1);
    Matrix z(n, nev + 1);
    std::array<a_int, 11> iparam{};
    std::array<a_int, 14> ipntr{};
    iparam[0] = 1;  // exact shifts
    iparam[2] = opts.max_restarts;
    iparam[6] = 1;  // standard problem A x = lambda x
    a_int ido = 0;
    a_int info = 1;  // use resid as the starting vector
    const double tol = opts.tolerance;

    const std::lock_guard lock(arpack_mutex);
    while (true) {
        dnaupd_c(&ido, "I", nn, "LM", nev, tol, resid.data(), ncv, v.data(), nn, iparam.data(), ipntr.data(),
                 workd.data(), workl.data(), lworkl, &info);
        if (ido != 1 && ido != -1) break;
        const Eigen::Map<const Vector> x(workd.data() + ipntr[0] - 1, n);
        Eigen::Map<Vector> y(workd.data() + ipntr[1] - 1, n);
        y.noalias() = m * x;
    }
    if (info == 1) {
        throw NumericalError("spectral_radius: ARPACK reached " + std::to_string(opts.max_restarts) +
                             " restarts without converging (n = " + std::to_string(n) + ")");
    }
    if (info != 0) throw NumericalError("spectral_radius: ARPACK dnaupd failed with info " + std::to_string(info));

    std::vector<a_int> select(static_cast<std::size_t>(ncv));
    dneupd_c(false, "A", select.data(), dr.data(), di.data(), z.data(), nn, 0.0, 0.0, workev.data(), "I", nn, "LM",
             nev, tol, resid.data(), ncv, v.data(), nn, iparam.data(), ipntr.data(), workd.data(), workl.data(),
             lworkl, &info);
    if (info != 0) throw NumericalError("spectral_radius: ARPACK dneupd failed with info " + std::to_string(info));

    double radius = 0.0;
    for (a_int i = 0; i < iparam[4]; ++i) radius = std::max(radius, std::hypot(dr(i), di(i)));
    return radius;
}

} // namespace

double spectral_radius(const SparseMatrix& m, const SpectralRadiusOptions& opts) {
    if (m.nonZeros() == 0) throw InvalidArgument("spectral_radius: zero matrix");
    return arnoldi_radius(m, opts);
}

double spectral_radius(const Matrix& m, const SpectralRadiusOptions& opts) {
    if (m.size() > 0 && m.cwiseAbs().maxCoeff() == 0.0) throw InvalidArgument("spectral_radius: zero matrix");
    return arnoldi_radius(m, opts);
}

ReservoirWeights build_weights(const ReservoirConfig& cfg, int input_dim) {
    cfg.validate();
    if (input_dim < 1) throw InvalidArgument("build_weights: input_dim must be >= 1");
    const int n = cfg.n_nodes;
    Rng rng(cfg.seed);

    ReservoirWeights w;
    w.w_in.resize(n, input_dim);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < input_dim; ++j) w.w_in(i, j) = rng.uniform(-cfg.input_scale, cfg.input_scale);

    // Each entry draws (keep, value) so the stream layout does not depend on sparsity.
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(static_cast<double>(n) * n * (1.0 - cfg.sparsity) * 1.1) + 16);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const bool keep = rng.uniform01() >= cfg.sparsity;
            const double value = rng.uniform(-1.0, 1.0);
            if (keep && value != 0.0) entries.emplace_back(i, j, value);
        }
    }
    if (entries.empty()) {
        throw InvalidArgument("build_weights: recurrent matrix is all zero after masking; "
                              "lower the sparsity or change the seed");
    }
    w.w_res.resize(n, n);
    w.w_res.setFromTriplets(entries.begin(), entries.end());
    w.w_res.makeCompressed();

    const double raw = spectral_radius(w.w_res);
    if (!(raw > 0.0)) {
        throw InvalidArgument("build_weights: recurrent matrix has spectral radius 0; "
                              "lower the sparsity or change the seed");
    }
    w.w_res *= cfg.spectral_radius / raw;
    w.realized_radius = spectral_radius(w.w_res);
    w.identity = reservoir_identity(cfg, input_dim);
    return w;
}

Vector update(const Vector& r, const Vector& u, const ReservoirWeights& w, const ReservoirConfig& cfg) {
    if (r.size() != w.n_nodes() || u.size() != w.input_dim()) {
        throw InvalidArgument("update: dimension mismatch");
    }
    Vector pre = w.w_res * r;
    pre.noalias() += w.w_in * u;
    pre.array() += cfg.bias;
    return (1.0 - cfg.leakage) * r + cfg.leakage * pre.array().tanh().matrix();
}

Vector update(const Vector& r, double u, const ReservoirWeights& w, const ReservoirConfig& cfg) {
    return update(r, Vector::Constant(1, u), w, cfg);
}

void drive_blocks(const ReservoirWeights& w, const ReservoirConfig& cfg, std::span<const double> input,
                  Eigen::Index block_cols, const StateBlockSink& sink) {
    if (w.input_dim() != 1) throw InvalidArgument("drive: scalar input requires a single-input reservoir");
    if (input.size() < cfg.washout) {
        throw InvalidArgument("drive: input length " + std::to_string(input.size()) +
                              " is shorter than washout " + std::to_string(cfg.washout));
    }
    if (block_cols < 1) block_cols = 1;
    const Eigen::Index n = w.n_nodes();
    const auto harvested = static_cast<Eigen::Index>(input.size() - cfg.washout);
    Matrix block(n, std::min(block_cols, std::max<Eigen::Index>(harvested, 1)));

    const double a = cfg.leakage;
    const auto w_in = w.w_in.col(0);
    Vector r = Vector::Zero(n);
    Vector pre(n);
    Eigen::Index filled = 0;
    Eigen::Index block_start = 0;
    for (std::size_t i = 0; i < input.size(); ++i) {
        pre.noalias() = w.w_res * r;
        pre.noalias() += input[i] * w_in;
        pre.array() += cfg.bias;
        r = (1.0 - a) * r + a * pre.array().tanh().matrix();
        if (i < cfg.washout) continue;
        block.col(filled++) = r;
        if (filled == block.cols()) {
            sink(block, block_start);
            block_start += filled;
            filled = 0;
        }
    }
    if (filled > 0) sink(block.leftCols(filled), block_start);
}

StateTrajectory drive(const ReservoirWeights& w, const ReservoirConfig& cfg, const TimeSeries& input) {
    if (input.size() <= cfg.washout) {
        throw InvalidArgument("drive: input length " + std::to_string(input.size()) +
                              " must exceed washout " + std::to_string(cfg.washout));
    }
    StateTrajectory out;
    out.dt = input.dt;
    out.states.resize(w.n_nodes(), static_cast<Eigen::Index>(input.size() - cfg.washout));
    drive_blocks(w, cfg, input.view(), 256, [&](const Eigen::Ref<const Matrix>& block, Eigen::Index first) {
        out.states.middleCols(first, block.cols()) = block;
    });
    return out;
}

void write_weights_csv(const ReservoirWeights& w, const std::filesystem::path& w_res_path,
                       const std::filesystem::path& w_in_path) {
    std::ofstream res(w_res_path);
    std::ofstream in(w_in_path);
    if (!res || !in) throw IoError("write_weights_csv: cannot open output files");
    char buf[64];
    res << "row,col,value\n";
    for (int i = 0; i < w.w_res.outerSize(); ++i) {
        for (SparseMatrix::InnerIterator it(w.w_res, i); it; ++it) {
            std::snprintf(buf, sizeof buf, "%.17g", it.value());
            res << it.row() << ',' << it.col() << ',' << buf << '\n';
        }
    }
    for (Eigen::Index i = 0; i < w.w_in.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.w_in.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", w.w_in(i, j));
            in << (j ? "," : "") << buf;
        }
        in << '\n';
    }
    if (!res || !in) throw IoError("write_weights_csv: write failed");
}

} // namespace rcsep
