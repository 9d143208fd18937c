#pragma once

// Linear readout trained by ridge regression, plus interpolation between
// readouts of the same reservoir.

#include "rcsep/reservoir.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace rcsep {

enum class RidgeSolver { cholesky, pseudo_inverse };

struct ReadoutWeights {
    Matrix w_out;  // M_o x N
    std::optional<double> trained_alpha;
    double ridge_reg = 0.0;
    std::uint64_t reservoir_identity = 0;
    RidgeSolver solver = RidgeSolver::cholesky;

    Eigen::Index n_nodes() const { return w_out.cols(); }
};

/// Streaming accumulator for the ridge normal equations. Holds R R^T
/// (lower triangle), S R^T and the running state sum, so the full state
/// trajectory never has to be materialized.
class RidgeAccumulator {
public:
    RidgeAccumulator(Eigen::Index n_nodes, Eigen::Index n_outputs);

    /// Adds states (N x b) with matching targets (M_o x b).
    void add(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& targets);

    /// Adds states whose target is the same constant vector for every column.
    void add_constant_target(const Eigen::Ref<const Matrix>& states, const Vector& target);

    /// W = S R^T (R R^T + reg I)^{-1}. Falls back to a pseudo-inverse when
    /// reg == 0 and R R^T is singular; the chosen route is recorded in the result.
    ReadoutWeights solve(double reg) const;

    Eigen::Index samples() const { return count_; }
    const Matrix& gram() const { return gram_; }  // lower triangle valid
    const Matrix& cross() const { return cross_; }

private:
    Matrix gram_;
    Matrix cross_;
    Eigen::Index count_ = 0;
};

/// Ridge regression on an explicit trajectory. S is M_o x T.
ReadoutWeights train_ridge(const StateTrajectory& r, const Matrix& s, double reg);

/// Single-output convenience overload.
ReadoutWeights train_ridge(const StateTrajectory& r, const TimeSeries& target, double reg);

/// First output row of W_out R as a time series.
TimeSeries predict(const ReadoutWeights& w, const StateTrajectory& r);

/// All output rows (M_o x T).
Matrix predict_all(const ReadoutWeights& w, const StateTrajectory& r);

/// Entrywise blend W_q = (q - q_lo)/(q_hi - q_lo) W_hi + (q_hi - q)/(q_hi - q_lo) W_lo.
/// Both readouts must be tagged with their alpha and come from the same reservoir.
ReadoutWeights interpolate(const ReadoutWeights& lo, const ReadoutWeights& hi, double q);

/// Readouts of one reservoir realization, sorted by trained alpha.
struct ReadoutBank {
    std::vector<ReadoutWeights> readouts;
    std::uint64_t reservoir_seed = 0;

    /// Readout for alpha q: exact grid match, blend of the bracketing pair,
    /// or the nearest endpoint when q falls outside the covered range.
    ReadoutWeights select(double q) const;
};

/// Writes `manifest.json` plus one `readout_<i>.csv` (one row per output) per readout.
void save_bank(const ReadoutBank& bank, const std::filesystem::path& dir);
ReadoutBank load_bank(const std::filesystem::path& dir);

} // namespace rcsep
