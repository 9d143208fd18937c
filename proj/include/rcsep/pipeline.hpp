#pragma once

// Separation experiments: known-alpha scenarios, alpha sweeps, the
// two-stage unknown-alpha pipeline and readout interpolation studies.
//
// Seeding: an experiment with master seed m and R repeats uses child seeds
// m, m+1, ..., m+R-1. A child seed c seeds the reservoir directly and the two
// Lorenz initial conditions through mix_seed(c, 1) and mix_seed(c, 2).

#include "rcsep/dynsys.hpp"
#include "rcsep/metrics.hpp"
#include "rcsep/readout.hpp"
#include "rcsep/reservoir.hpp"
#include "rcsep/wiener.hpp"

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rcsep {

enum class ScenarioKind { diff_params, diff_speed, matched_spectra, custom };
enum class Component { x = 0, y = 1, z = 2 };

/// How ReservoirConfig::input_scale is read. `raw`: k bounds input weights
/// applied to the unnormalized component, so the realized bound on the
/// unit-variance mixture is k times the raw standard deviation of s1 over
/// the training window. `normalized`: k is used as is.
enum class InputUnits { raw, normalized };

std::string to_string(ScenarioKind k);
std::string to_string(Component c);
std::string to_string(InputUnits u);
ScenarioKind parse_scenario_kind(const std::string& s);
Component parse_component(const std::string& s);
InputUnits parse_input_units(const std::string& s);

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::diff_params;
    LorenzParams p1 = LorenzParams::classical();
    LorenzParams p2 = LorenzParams::classical().scaled(1.2);
    Component component = Component::x;
    std::optional<double> alpha;
    std::size_t train_len = 50000;
    std::size_t test_len = 5000;
    ReservoirConfig reservoir;
    double ridge_reg = 1e-6;
    std::uint64_t seed = 0;
    std::size_t repeats = 1;
    std::size_t seg_len = kDefaultSegmentLength;
    std::size_t overlap = kDefaultSegmentLength / 2;
    std::size_t transient_steps = kDefaultTransientSteps;
    bool renormalize_mix = false;
    bool exclude_filter_edges = false;
    InputUnits input_units = InputUnits::raw;

    /// Scenario defaults: diff_params p2 = 1.2 p1; diff_speed speed1 = 1.2,
    /// speed2 = 1; matched_spectra p2 = 1.1 p1 with speed2 = 0.9.
    static ScenarioSpec preset(ScenarioKind kind);

    std::vector<std::uint64_t> seeds() const;
    void validate() const;
};

/// Normalized component signals of one seed, laid out as
/// [washout | train | test]; statistics come from the first washout + train samples.
struct ScenarioSignals {
    TimeSeries s1;
    TimeSeries s2;
    std::size_t washout = 0;
    std::size_t train_len = 0;
    std::size_t test_len = 0;
};

ScenarioSignals prepare_signals(const ScenarioSpec& spec, std::uint64_t seed);

/// Reservoir configuration actually realized for one seed: the seed is set
/// and input_scale converted according to spec.input_units.
ReservoirConfig realized_reservoir(const ScenarioSpec& spec, const ScenarioSignals& sig, std::uint64_t seed);

/// Mixture of the prepared signals (re-normalized on the training window if requested).
TimeSeries mixture(const ScenarioSpec& spec, const ScenarioSignals& sig, double alpha);

struct SeparationResult {
    double alpha = 0.0;
    std::uint64_t seed = 0;
    ErrorReport rc;
    ErrorReport wiener;
    /// E of zeta* u; 1 by construction whenever defined.
    std::optional<double> self_check;
    TimeSeries actual;
    TimeSeries rc_prediction;
    TimeSeries wiener_prediction;
    TimeSeries mixed;
    ReadoutWeights readout;
    WienerFilter filter;
};

/// Trains the reservoir readout and the Wiener filter on the training window
/// and scores both on the held-out test window. `weights` may be supplied to
/// reuse a reservoir already built for this seed.
SeparationResult run_separation(const ScenarioSpec& spec, std::uint64_t seed,
                                const ReservoirWeights* weights = nullptr);

/// Mean and standard error (sample deviation over sqrt(count)).
struct Summary {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

Summary summarize(const std::vector<double>& values);

struct SweepRow {
    double alpha = 0.0;
    Summary rc_normalized;
    Summary wiener_normalized;
    Summary rc_numerator;
    Summary wiener_numerator;
};

struct SweepRun {
    double alpha = 0.0;
    std::uint64_t seed = 0;
    ErrorReport rc;
    ErrorReport wiener;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SweepRun> runs;  // sorted by (alpha, seed)
};

/// Runs every (alpha, seed) pair with `jobs` worker threads. Output order
/// does not depend on `jobs`.
SweepResult sweep_alpha(const ScenarioSpec& spec, const std::vector<double>& alphas, int jobs = 1);

// --- unknown mixing fraction -------------------------------------------------

struct AlphaEstimatorConfig {
    LorenzParams p1 = LorenzParams::classical();
    LorenzParams p2 = LorenzParams::classical().scaled(1.2);
    Component component = Component::x;
    std::vector<double> grid;  // defaults to 0, 0.05, ..., 1
    ReservoirConfig reservoir;
    double ridge_reg = 1e-6;
    std::size_t train_len = 50000;
    std::size_t test_len = 50000;
    std::size_t transient_steps = kDefaultTransientSteps;
    std::uint64_t seed = 0;
    /// Reference for raw units: the p1 component of the first training stream.
    InputUnits input_units = InputUnits::raw;

    /// N = 1000, sparsity 0.99, bias 1, 0.05 grid spacing.
    static AlphaEstimatorConfig defaults();
};

struct AlphaEstimator {
    ReservoirConfig config;  // as realized (input_scale converted)
    std::shared_ptr<const ReservoirWeights> weights;
    ReadoutWeights readout;
    /// c0 + c1 x + c2 x^2 + c3 x^3 mapping raw averaged output to alpha.
    std::array<double, 4> correction{0.0, 1.0, 0.0, 0.0};
    std::vector<double> training_grid;
    std::vector<double> raw_train;  // time-averaged raw output per grid point (training data)
    /// True when the correction is nondecreasing over the observed raw range.
    bool monotone = true;

    double correct(double raw) const;
};

/// Least-squares cubic through (raw, target) pairs. Needs at least four
/// distinct raw values.
std::array<double, 4> fit_cubic(const std::vector<double>& raw, const std::vector<double>& target);

/// True when the cubic's derivative is >= 0 on [lo, hi].
bool cubic_nondecreasing(const std::array<double, 4>& c, double lo, double hi);

AlphaEstimator train_alpha_estimator(const AlphaEstimatorConfig& cfg);

struct AlphaEstimate {
    double raw = 0.0;
    double corrected = 0.0;
};

/// Drives the estimator's reservoir, averages the post-washout readout and
/// applies the clamped cubic correction.
AlphaEstimate estimate_alpha_detailed(const AlphaEstimator& est, const TimeSeries& u);
double estimate_alpha(const AlphaEstimator& est, const TimeSeries& u);

/// Held-out mixtures at every grid alpha (fresh trajectories) for testing an estimator.
std::vector<TimeSeries> alpha_test_mixtures(const AlphaEstimatorConfig& cfg, std::size_t length,
                                            std::uint64_t stream_offset = 1);

struct SeparatedSignal {
    double estimated_alpha = 0.0;
    ReadoutWeights readout;
    TimeSeries prediction;
};

/// Two-stage separation: estimate alpha, blend the bracketing bank readouts,
/// predict s1. `weights`/`cfg` are the reservoir the bank was trained on.
SeparatedSignal separate_unknown(const AlphaEstimator& est, const ReadoutBank& bank, const ReservoirWeights& weights,
                                 const ReservoirConfig& cfg, const TimeSeries& u);

// --- readout interpolation ----------------------------------------------------

/// Trains readouts for one seed on a shared reservoir and scores them on test
/// mixtures. Readouts are cached per alpha.
class ReadoutLab {
public:
    ReadoutLab(const ScenarioSpec& spec, std::uint64_t seed);

    const ReservoirWeights& weights() const { return *weights_; }
    const ReservoirConfig& config() const { return cfg_; }
    const ScenarioSignals& signals() const { return signals_; }

    /// Readout trained on the training window of the alpha mixture (cached).
    const ReadoutWeights& readout(double alpha);
    ReadoutBank bank(const std::vector<double>& alphas);

    /// Scores each readout on the test window of the `test_alpha` mixture
    /// (one reservoir drive shared by all readouts).
    std::vector<ErrorReport> evaluate(const std::vector<const ReadoutWeights*>& readouts, double test_alpha) const;

private:
    ScenarioSpec spec_;
    ReservoirConfig cfg_;
    std::shared_ptr<const ReservoirWeights> weights_;
    ScenarioSignals signals_;
    std::map<double, ReadoutWeights> readouts_;
};

struct InterpolationRow {
    double spacing = 0.0;
    double q = 0.0;
    double q_lo = 0.0;
    double q_hi = 0.0;
    double direct = 0.0;        // mean E_R of readouts trained at q
    double interpolated = 0.0;  // mean E_R of blended readouts
    double ratio = 1.0;         // interpolated / direct
};

/// For each spacing d, blends readouts trained at center -/+ d/2 and compares
/// with a readout trained at the center.
std::vector<InterpolationRow> interpolation_study(const ScenarioSpec& spec, double center,
                                                  const std::vector<double>& spacings, int jobs = 1);

/// Scores blended readouts from a fixed bank against directly trained ones at each query alpha.
std::vector<InterpolationRow> bank_interpolation(const ScenarioSpec& spec, const std::vector<double>& bank_alphas,
                                                 const std::vector<double>& queries, int jobs = 1);

/// Runs fn(i) for i in [0, count) on up to `jobs` threads; rethrows the
/// first failure (by index).
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

} // namespace rcsep
