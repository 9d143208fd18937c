#pragma once

// Echo-state reservoir: random input/recurrent weights and the leaky-tanh
// state update.

#include "rcsep/dynsys.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <filesystem>
#include <functional>

namespace rcsep {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct ReservoirConfig {
    int n_nodes = 2000;
    double spectral_radius = 0.9;
    double leakage = 0.3;
    double input_scale = 0.13;
    double bias = 0.0;
    double sparsity = 0.95;
    std::size_t washout = 200;
    std::uint64_t seed = 0;

    /// Throws InvalidArgument if any field is out of range.
    void validate() const;
};

/// Realized random weights. Immutable once built; safe to share across threads.
struct ReservoirWeights {
    Matrix w_in;          // N x M_i
    SparseMatrix w_res;   // N x N
    double realized_radius = 0.0;
    /// Fingerprint of (seed, config, input_dim); readouts carry it so that
    /// only readouts of the same realization can be combined.
    std::uint64_t identity = 0;

    int n_nodes() const { return static_cast<int>(w_res.rows()); }
    int input_dim() const { return static_cast<int>(w_in.cols()); }
};

/// Post-washout reservoir states, one column per consumed input sample.
struct StateTrajectory {
    Matrix states;  // N x T
    double dt = 0.05;

    Eigen::Index steps() const { return states.cols(); }
};

std::uint64_t reservoir_identity(const ReservoirConfig& cfg, int input_dim);

ReservoirWeights build_weights(const ReservoirConfig& cfg, int input_dim = 1);

struct SpectralRadiusOptions {
    /// Implicit restarts allowed before giving up.
    int max_restarts = 3000;
    /// Relative accuracy requested for the dominant Ritz values.
    double tolerance = 1e-12;
    /// Eigenvalues tracked; more than one keeps complex pairs together.
    int n_eigenvalues = 6;
    /// Krylov subspace dimension (clamped to N).
    int krylov_dim = 40;
    /// Matrices this small go straight to the dense eigensolver.
    int dense_below = 64;
};

/// Magnitude of the dominant eigenvalue of a square matrix. Uses ARPACK's
/// implicitly restarted Arnoldi iteration (largest magnitude) from a fixed
/// starting vector, so the result is a deterministic function of the matrix.
/// Throws NumericalError when ARPACK fails to converge.
double spectral_radius(const SparseMatrix& m, const SpectralRadiusOptions& opts = {});
double spectral_radius(const Matrix& m, const SpectralRadiusOptions& opts = {});

/// r' = (1 - a) r + a tanh(W_in u + W_res r + b).
Vector update(const Vector& r, const Vector& u, const ReservoirWeights& w, const ReservoirConfig& cfg);

/// Scalar-input convenience overload.
Vector update(const Vector& r, double u, const ReservoirWeights& w, const ReservoirConfig& cfg);

/// Receives consecutive blocks of harvested states. `first_col` is the index
/// of the block's first column within the post-washout trajectory.
using StateBlockSink = std::function<void(const Eigen::Ref<const Matrix>& block, Eigen::Index first_col)>;

/// Streams the post-washout states of a drive from r = 0 in blocks of at
/// most `block_cols` columns. Column t is the state after consuming input
/// sample washout + t.
void drive_blocks(const ReservoirWeights& w, const ReservoirConfig& cfg, std::span<const double> input,
                  Eigen::Index block_cols, const StateBlockSink& sink);

/// Drives from r = 0, discards the first `washout` states and returns the rest.
StateTrajectory drive(const ReservoirWeights& w, const ReservoirConfig& cfg, const TimeSeries& input);

/// Writes w_res as `row,col,value` triplets and w_in as dense rows.
void write_weights_csv(const ReservoirWeights& w, const std::filesystem::path& w_res_path,
                       const std::filesystem::path& w_in_path);

} // namespace rcsep
