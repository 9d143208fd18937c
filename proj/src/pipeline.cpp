#include "rcsep/pipeline.hpp"

#include "rcsep/error.hpp"
#include "rcsep/random.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace rcsep {

std::string to_string(ScenarioKind k) {
    switch (k) {
    case ScenarioKind::diff_params: return "diff_params";
    case ScenarioKind::diff_speed: return "diff_speed";
    case ScenarioKind::matched_spectra: return "matched_spectra";
    case ScenarioKind::custom: return "custom";
    }
    return "custom";
}

std::string to_string(Component c) {
    switch (c) {
    case Component::x: return "x";
    case Component::y: return "y";
    case Component::z: return "z";
    }
    return "x";
}

std::string to_string(InputUnits u) {
    return u == InputUnits::raw ? "raw" : "normalized";
}

InputUnits parse_input_units(const std::string& s) {
    if (s == "raw") return InputUnits::raw;
    if (s == "normalized") return InputUnits::normalized;
    throw InvalidArgument("unknown input units '" + s + "' (expected raw or normalized)");
}

ScenarioKind parse_scenario_kind(const std::string& s) {
    if (s == "diff_params") return ScenarioKind::diff_params;
    if (s == "diff_speed") return ScenarioKind::diff_speed;
    if (s == "matched_spectra") return ScenarioKind::matched_spectra;
    if (s == "custom") return ScenarioKind::custom;
    throw InvalidArgument("unknown scenario kind '" + s + "'");
}

Component parse_component(const std::string& s) {
    if (s == "x") return Component::x;
    if (s == "y") return Component::y;
    if (s == "z") return Component::z;
    throw InvalidArgument("unknown component '" + s + "' (expected x, y or z)");
}

ScenarioSpec ScenarioSpec::preset(ScenarioKind kind) {
    ScenarioSpec s;
    s.kind = kind;
    const LorenzParams base = LorenzParams::classical();
    switch (kind) {
    case ScenarioKind::diff_params:
    case ScenarioKind::custom:
        s.p1 = base;
        s.p2 = base.scaled(1.2);
        break;
    case ScenarioKind::diff_speed:
        s.p1 = base.with_speed(1.2);
        s.p2 = base;
        break;
    case ScenarioKind::matched_spectra:
        s.p1 = base;
        s.p2 = base.scaled(1.1).with_speed(0.9);
        break;
    }
    return s;
}

std::vector<std::uint64_t> ScenarioSpec::seeds() const {
    std::vector<std::uint64_t> out(repeats);
    for (std::size_t i = 0; i < repeats; ++i) out[i] = seed + i;
    return out;
}

void ScenarioSpec::validate() const {
    reservoir.validate();
    if (train_len == 0 || test_len == 0) throw InvalidArgument("scenario: train_len and test_len must be positive");
    if (train_len <= reservoir.washout || test_len <= reservoir.washout) {
        throw InvalidArgument("scenario: train_len and test_len must exceed the washout");
    }
    if (alpha && !(*alpha >= 0.0 && *alpha <= 1.0)) throw InvalidArgument("scenario: alpha must lie in [0, 1]");
    if (!(ridge_reg >= 0.0)) throw InvalidArgument("scenario: ridge_reg must be >= 0");
    if (repeats == 0) throw InvalidArgument("scenario: repeats must be >= 1");
    if (overlap >= seg_len) throw InvalidArgument("scenario: overlap must be smaller than seg_len");
    if (train_len < seg_len || test_len < seg_len) {
        throw InvalidArgument("scenario: train_len and test_len must be at least seg_len");
    }
    if (!(p1.speed > 0.0 && p2.speed > 0.0)) throw InvalidArgument("scenario: speeds must be positive");
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

namespace {

TimeSeries component_series(std::array<TimeSeries, 3>&& xyz, Component c) {
    return std::move(xyz[static_cast<int>(c)]);
}

ReservoirConfig seeded(const ReservoirConfig& cfg, std::uint64_t seed) {
    ReservoirConfig out = cfg;
    out.seed = seed;
    return out;
}

Eigen::Map<const Eigen::RowVectorXd> row_view(const TimeSeries& s, std::size_t first, std::size_t count) {
    return {s.samples.data() + first, static_cast<Eigen::Index>(count)};
}

TimeSeries from_row(const Eigen::RowVectorXd& row, double dt) {
    TimeSeries out;
    out.dt = dt;
    out.samples.assign(row.data(), row.data() + row.size());
    return out;
}

struct SeparationInputs {
    const ScenarioSpec& spec;
    std::uint64_t seed;
    const ReservoirWeights& weights;
    const ReservoirConfig& cfg;
    const ScenarioSignals& signals;
    double alpha;
};

SeparationResult separate(const SeparationInputs& in) {
    const ScenarioSpec& spec = in.spec;
    const ScenarioSignals& sig = in.signals;
    const TimeSeries u = mixture(spec, sig, in.alpha);
    const auto n = static_cast<Eigen::Index>(in.weights.n_nodes());
    const auto train = static_cast<Eigen::Index>(sig.train_len);
    const auto test = static_cast<Eigen::Index>(sig.test_len);

    // One continuous drive: post-washout columns [0, train) train the readout,
    // [train, train + test) are kept for scoring.
    RidgeAccumulator acc(n, 1);
    Matrix test_states(n, test);
    drive_blocks(in.weights, in.cfg, u.view(), 512, [&](const Eigen::Ref<const Matrix>& block, Eigen::Index first) {
        const Eigen::Index cols = block.cols();
        const Eigen::Index n_train = std::clamp<Eigen::Index>(train - first, 0, cols);
        if (n_train > 0) {
            acc.add(block.leftCols(n_train),
                    row_view(sig.s1, sig.washout + static_cast<std::size_t>(first), static_cast<std::size_t>(n_train)));
        }
        if (n_train < cols) {
            test_states.middleCols(first + n_train - train, cols - n_train) = block.rightCols(cols - n_train);
        }
    });

    SeparationResult res;
    res.alpha = in.alpha;
    res.seed = in.seed;
    res.readout = acc.solve(spec.ridge_reg);
    res.readout.trained_alpha = in.alpha;
    res.readout.reservoir_identity = in.weights.identity;

    const std::size_t test_first = sig.washout + sig.train_len;
    res.actual = sig.s1.slice(test_first, sig.test_len);
    res.mixed = u.slice(test_first, sig.test_len);
    res.rc_prediction = from_row(res.readout.w_out.row(0) * test_states, u.dt);

    res.filter = build_wiener(u.slice(sig.washout, sig.train_len), sig.s1.slice(sig.washout, sig.train_len),
                              spec.seg_len, spec.overlap);
    res.wiener_prediction = apply(res.filter, res.mixed);

    ErrorWindow window;
    if (spec.exclude_filter_edges) window.exclude_edges = res.filter.edge_margin();
    res.rc = normalized_error(res.actual, res.rc_prediction, res.mixed, "rc", window);
    res.wiener = normalized_error(res.actual, res.wiener_prediction, res.mixed, "wiener", window);

    TimeSeries scaled = res.mixed;
    for (double& v : scaled.samples) v *= res.rc.zeta_star;
    const ErrorReport baseline = normalized_error(res.actual, scaled, res.mixed, "baseline", window);
    res.self_check = baseline.e_normalized;
    if (res.self_check && std::abs(*res.self_check - 1.0) > 1e-9) {
        throw NumericalError("run_separation: self-check E(zeta* u) = " + std::to_string(*res.self_check) +
                             " differs from 1");
    }
    return res;
}

} // namespace

ScenarioSignals prepare_signals(const ScenarioSpec& spec, std::uint64_t seed) {
    ScenarioSignals sig;
    sig.washout = spec.reservoir.washout;
    sig.train_len = spec.train_len;
    sig.test_len = spec.test_len;
    const std::size_t total = sig.washout + sig.train_len + sig.test_len;
    const std::size_t fit_len = sig.washout + sig.train_len;

    GenerateOptions gen;
    gen.transient_steps = spec.transient_steps;
    TimeSeries raw1 = component_series(generate(spec.p1, perturbed_initial_state(mix_seed(seed, 1)), total, gen),
                                       spec.component);
    TimeSeries raw2 = component_series(generate(spec.p2, perturbed_initial_state(mix_seed(seed, 2)), total, gen),
                                       spec.component);
    sig.s1 = normalize_with(raw1, compute_stats(std::span(raw1.samples).first(fit_len)));
    sig.s2 = normalize_with(raw2, compute_stats(std::span(raw2.samples).first(fit_len)));
    return sig;
}

ReservoirConfig realized_reservoir(const ScenarioSpec& spec, const ScenarioSignals& sig, std::uint64_t seed) {
    ReservoirConfig cfg = seeded(spec.reservoir, seed);
    if (spec.input_units == InputUnits::raw) {
        if (!sig.s1.norm) throw InvalidArgument("realized_reservoir: s1 carries no normalization record");
        cfg.input_scale *= sig.s1.norm->stddev;
    }
    return cfg;
}

TimeSeries mixture(const ScenarioSpec& spec, const ScenarioSignals& sig, double alpha) {
    TimeSeries u = mix(sig.s1, sig.s2, MixSpec{alpha});
    if (spec.renormalize_mix) {
        u = normalize_with(u, compute_stats(std::span(u.samples).first(sig.washout + sig.train_len)));
    }
    return u;
}

SeparationResult run_separation(const ScenarioSpec& spec, std::uint64_t seed, const ReservoirWeights* weights) {
    spec.validate();
    if (!spec.alpha) throw InvalidArgument("run_separation: alpha is required");
    const ScenarioSignals sig = prepare_signals(spec, seed);
    const ReservoirConfig cfg = realized_reservoir(spec, sig, seed);
    std::optional<ReservoirWeights> local;
    if (!weights) {
        local = build_weights(cfg, 1);
        weights = &*local;
    } else if (weights->identity != reservoir_identity(cfg, 1)) {
        throw InvalidArgument("run_separation: supplied reservoir does not match the configuration and seed");
    }
    return separate({spec, seed, *weights, cfg, sig, *spec.alpha});
}

Summary summarize(const std::vector<double>& values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) return s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
        s.std_error = sd / std::sqrt(static_cast<double>(values.size()));
    }
    return s;
}

SweepResult sweep_alpha(const ScenarioSpec& spec, const std::vector<double>& alphas, int jobs) {
    spec.validate();
    if (alphas.empty()) throw InvalidArgument("sweep_alpha: no alpha values given");
    for (double a : alphas) {
        if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("sweep_alpha: alpha values must lie in [0, 1]");
    }
    const std::vector<std::uint64_t> seeds = spec.seeds();

    std::vector<std::optional<ReservoirWeights>> weights(seeds.size());
    std::vector<ScenarioSignals> signals(seeds.size());
    std::vector<ReservoirConfig> configs(seeds.size());
    parallel_for(seeds.size(), jobs, [&](std::size_t i) {
        signals[i] = prepare_signals(spec, seeds[i]);
        configs[i] = realized_reservoir(spec, signals[i], seeds[i]);
        weights[i] = build_weights(configs[i], 1);
    });

    SweepResult out;
    out.runs.resize(alphas.size() * seeds.size());
    parallel_for(out.runs.size(), jobs, [&](std::size_t task) {
        const std::size_t ai = task / seeds.size();
        const std::size_t si = task % seeds.size();
        const SeparationResult r = separate({spec, seeds[si], *weights[si], configs[si], signals[si], alphas[ai]});
        out.runs[task] = SweepRun{alphas[ai], seeds[si], r.rc, r.wiener};
    });

    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        std::vector<double> rc_norm, w_norm, rc_num, w_num;
        for (std::size_t si = 0; si < seeds.size(); ++si) {
            const SweepRun& run = out.runs[ai * seeds.size() + si];
            if (run.rc.e_normalized) rc_norm.push_back(*run.rc.e_normalized);
            if (run.wiener.e_normalized) w_norm.push_back(*run.wiener.e_normalized);
            rc_num.push_back(run.rc.e_numerator);
            w_num.push_back(run.wiener.e_numerator);
        }
        out.rows.push_back({alphas[ai], summarize(rc_norm), summarize(w_norm), summarize(rc_num), summarize(w_num)});
    }
    return out;
}

// --- unknown mixing fraction -------------------------------------------------

AlphaEstimatorConfig AlphaEstimatorConfig::defaults() {
    AlphaEstimatorConfig c;
    c.reservoir.n_nodes = 1000;
    c.reservoir.sparsity = 0.99;
    c.reservoir.bias = 1.0;
    for (int i = 0; i <= 20; ++i) c.grid.push_back(i / 20.0);
    return c;
}

double AlphaEstimator::correct(double raw) const {
    const auto& c = correction;
    return c[0] + raw * (c[1] + raw * (c[2] + raw * c[3]));
}

std::array<double, 4> fit_cubic(const std::vector<double>& raw, const std::vector<double>& target) {
    if (raw.size() != target.size()) throw InvalidArgument("fit_cubic: size mismatch");
    std::vector<double> distinct = raw;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 4) {
        throw InvalidArgument("fit_cubic: degenerate fit, need at least 4 distinct raw values (got " +
                              std::to_string(distinct.size()) + ")");
    }
    Matrix v(static_cast<Eigen::Index>(raw.size()), 4);
    Vector y(static_cast<Eigen::Index>(raw.size()));
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        v(r, 0) = 1.0;
        v(r, 1) = raw[i];
        v(r, 2) = raw[i] * raw[i];
        v(r, 3) = raw[i] * raw[i] * raw[i];
        y(r) = target[i];
    }
    const Vector c = v.colPivHouseholderQr().solve(y);
    return {c(0), c(1), c(2), c(3)};
}

bool cubic_nondecreasing(const std::array<double, 4>& c, double lo, double hi) {
    auto slope = [&](double x) { return c[1] + 2.0 * c[2] * x + 3.0 * c[3] * x * x; };
    const double tol = -1e-12;
    if (slope(lo) < tol || slope(hi) < tol) return false;
    if (c[3] != 0.0) {
        const double vertex = -c[2] / (3.0 * c[3]);
        if (vertex > lo && vertex < hi && slope(vertex) < tol) return false;
    }
    return true;
}

namespace {

/// Mixture of fresh normalized trajectories for one alpha-grid point.
TimeSeries estimator_mixture(const AlphaEstimatorConfig& cfg, double alpha, std::uint64_t stream, std::size_t length) {
    GenerateOptions gen;
    gen.transient_steps = cfg.transient_steps;
    const std::uint64_t base = mix_seed(cfg.seed, stream);
    TimeSeries s1 = normalize(component_series(generate(cfg.p1, perturbed_initial_state(mix_seed(base, 1)), length, gen),
                                               cfg.component));
    TimeSeries s2 = normalize(component_series(generate(cfg.p2, perturbed_initial_state(mix_seed(base, 2)), length, gen),
                                               cfg.component));
    return mix(s1, s2, MixSpec{alpha});
}

/// Raw standard deviation of the p1 component on the first training stream.
double raw_reference_std(const AlphaEstimatorConfig& cfg, std::size_t length) {
    GenerateOptions gen;
    gen.transient_steps = cfg.transient_steps;
    const std::uint64_t base = mix_seed(cfg.seed, 0);
    const TimeSeries s1 = component_series(
        generate(cfg.p1, perturbed_initial_state(mix_seed(base, 1)), length, gen), cfg.component);
    return compute_stats(s1.view()).stddev;
}

Vector mean_state(const ReservoirWeights& w, const ReservoirConfig& cfg, const TimeSeries& u) {
    Vector sum = Vector::Zero(w.n_nodes());
    Eigen::Index count = 0;
    drive_blocks(w, cfg, u.view(), 512, [&](const Eigen::Ref<const Matrix>& block, Eigen::Index) {
        sum += block.rowwise().sum();
        count += block.cols();
    });
    if (count == 0) throw InvalidArgument("estimate_alpha: input must be longer than the washout");
    return sum / static_cast<double>(count);
}

} // namespace

AlphaEstimator train_alpha_estimator(const AlphaEstimatorConfig& cfg) {
    if (cfg.grid.empty()) throw InvalidArgument("train_alpha_estimator: empty alpha grid");
    for (double a : cfg.grid) {
        if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("train_alpha_estimator: grid values must lie in [0, 1]");
    }
    if (cfg.train_len <= cfg.reservoir.washout) {
        throw InvalidArgument("train_alpha_estimator: train_len must exceed the washout");
    }

    AlphaEstimator est;
    est.config = cfg.reservoir;
    if (cfg.input_units == InputUnits::raw) {
        est.config.input_scale *= raw_reference_std(cfg, cfg.reservoir.washout + cfg.train_len);
    }
    est.weights = std::make_shared<const ReservoirWeights>(build_weights(est.config, 1));
    est.training_grid = cfg.grid;
    const ReservoirWeights& w = *est.weights;
    const Eigen::Index n = w.n_nodes();

    // The reservoir restarts from zero (with a fresh washout) for every grid
    // point, so no state leaks between mixing fractions.
    RidgeAccumulator acc(n, 1);
    std::vector<Vector> means;
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
        const TimeSeries u = estimator_mixture(cfg, cfg.grid[i], 2 * i, cfg.reservoir.washout + cfg.train_len);
        const Vector target = Vector::Constant(1, cfg.grid[i]);
        Vector sum = Vector::Zero(n);
        Eigen::Index count = 0;
        drive_blocks(w, est.config, u.view(), 512, [&](const Eigen::Ref<const Matrix>& block, Eigen::Index) {
            acc.add_constant_target(block, target);
            sum += block.rowwise().sum();
            count += block.cols();
        });
        means.push_back(sum / static_cast<double>(count));
    }
    est.readout = acc.solve(cfg.ridge_reg);
    est.readout.reservoir_identity = w.identity;

    for (const Vector& m : means) est.raw_train.push_back((est.readout.w_out.row(0) * m)(0));
    est.correction = fit_cubic(est.raw_train, cfg.grid);
    const auto [lo, hi] = std::minmax_element(est.raw_train.begin(), est.raw_train.end());
    est.monotone = cubic_nondecreasing(est.correction, *lo, *hi);
    return est;
}

std::vector<TimeSeries> alpha_test_mixtures(const AlphaEstimatorConfig& cfg, std::size_t length,
                                            std::uint64_t stream_offset) {
    std::vector<TimeSeries> out;
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
        // Training uses streams 2i; held-out data uses odd streams shifted by the offset.
        const std::uint64_t stream = 2 * i + 1 + 2 * cfg.grid.size() * (stream_offset - 1);
        out.push_back(estimator_mixture(cfg, cfg.grid[i], stream, length));
    }
    return out;
}

AlphaEstimate estimate_alpha_detailed(const AlphaEstimator& est, const TimeSeries& u) {
    if (!est.weights) throw InvalidArgument("estimate_alpha: estimator has no reservoir");
    if (u.size() <= est.config.washout) throw InvalidArgument("estimate_alpha: input must be longer than the washout");
    const Vector m = mean_state(*est.weights, est.config, u);
    AlphaEstimate out;
    out.raw = (est.readout.w_out.row(0) * m)(0);
    out.corrected = std::clamp(est.correct(out.raw), 0.0, 1.0);
    return out;
}

double estimate_alpha(const AlphaEstimator& est, const TimeSeries& u) {
    return estimate_alpha_detailed(est, u).corrected;
}

SeparatedSignal separate_unknown(const AlphaEstimator& est, const ReadoutBank& bank, const ReservoirWeights& weights,
                                 const ReservoirConfig& cfg, const TimeSeries& u) {
    if (bank.readouts.empty()) throw InvalidArgument("separate_unknown: empty readout bank");
    for (const auto& r : bank.readouts) {
        if (r.reservoir_identity != weights.identity) {
            throw InvalidArgument("separate_unknown: bank readouts were trained on a different reservoir");
        }
        if (!r.trained_alpha) throw InvalidArgument("separate_unknown: bank readouts must carry their alpha");
    }
    SeparatedSignal out;
    out.estimated_alpha = estimate_alpha(est, u);
    out.readout = bank.select(out.estimated_alpha);
    out.prediction = predict(out.readout, drive(weights, cfg, u));
    return out;
}

// --- readout interpolation ----------------------------------------------------

ReadoutLab::ReadoutLab(const ScenarioSpec& spec, std::uint64_t seed) : spec_(spec) {
    spec_.validate();
    signals_ = prepare_signals(spec_, seed);
    cfg_ = realized_reservoir(spec_, signals_, seed);
    weights_ = std::make_shared<const ReservoirWeights>(build_weights(cfg_, 1));
}

const ReadoutWeights& ReadoutLab::readout(double alpha) {
    if (auto it = readouts_.find(alpha); it != readouts_.end()) return it->second;
    const TimeSeries u = mixture(spec_, signals_, alpha);
    const std::span<const double> train_input = u.view().first(signals_.washout + signals_.train_len);
    RidgeAccumulator acc(weights_->n_nodes(), 1);
    drive_blocks(*weights_, cfg_, train_input, 512, [&](const Eigen::Ref<const Matrix>& block, Eigen::Index first) {
        acc.add(block, row_view(signals_.s1, signals_.washout + static_cast<std::size_t>(first),
                                static_cast<std::size_t>(block.cols())));
    });
    ReadoutWeights w = acc.solve(spec_.ridge_reg);
    w.trained_alpha = alpha;
    w.reservoir_identity = weights_->identity;
    return readouts_.emplace(alpha, std::move(w)).first->second;
}

ReadoutBank ReadoutLab::bank(const std::vector<double>& alphas) {
    ReadoutBank b;
    b.reservoir_seed = cfg_.seed;
    std::vector<double> sorted = alphas;
    std::sort(sorted.begin(), sorted.end());
    for (double a : sorted) b.readouts.push_back(readout(a));
    return b;
}

std::vector<ErrorReport> ReadoutLab::evaluate(const std::vector<const ReadoutWeights*>& readouts,
                                              double test_alpha) const {
    const TimeSeries u = mixture(spec_, signals_, test_alpha);
    // The test drive warms up on the last `washout` training samples.
    const TimeSeries input = u.slice(signals_.train_len, signals_.washout + signals_.test_len);
    const StateTrajectory states = drive(*weights_, cfg_, input);
    const std::size_t test_first = signals_.washout + signals_.train_len;
    const TimeSeries actual = signals_.s1.slice(test_first, signals_.test_len);
    const TimeSeries mixed = u.slice(test_first, signals_.test_len);

    std::vector<ErrorReport> out;
    for (const ReadoutWeights* r : readouts) {
        if (r->reservoir_identity != weights_->identity) {
            throw InvalidArgument("ReadoutLab::evaluate: readout belongs to a different reservoir");
        }
        out.push_back(normalized_error(actual, predict(*r, states), mixed, "rc"));
    }
    return out;
}

namespace {

double normalized_or_nan(const ErrorReport& r) {
    return r.e_normalized ? *r.e_normalized : std::nan("");
}

InterpolationRow average_rows(const std::vector<InterpolationRow>& per_seed) {
    InterpolationRow out = per_seed.front();
    out.direct = 0.0;
    out.interpolated = 0.0;
    for (const auto& r : per_seed) {
        out.direct += r.direct;
        out.interpolated += r.interpolated;
    }
    out.direct /= static_cast<double>(per_seed.size());
    out.interpolated /= static_cast<double>(per_seed.size());
    out.ratio = out.interpolated / out.direct;
    return out;
}

} // namespace

std::vector<InterpolationRow> interpolation_study(const ScenarioSpec& spec, double center,
                                                  const std::vector<double>& spacings, int jobs) {
    spec.validate();
    for (double d : spacings) {
        if (!(d >= 0.0) || center - d / 2 < 0.0 || center + d / 2 > 1.0) {
            throw InvalidArgument("interpolation_study: spacing " + std::to_string(d) + " leaves [0, 1] around " +
                                  std::to_string(center));
        }
    }
    const std::vector<std::uint64_t> seeds = spec.seeds();
    std::vector<std::vector<InterpolationRow>> per_seed(seeds.size());
    parallel_for(seeds.size(), jobs, [&](std::size_t si) {
        ReadoutLab lab(spec, seeds[si]);
        const ReadoutWeights direct = lab.readout(center);
        std::vector<ReadoutWeights> blended;
        for (double d : spacings) {
            if (d == 0.0) {
                blended.push_back(interpolate(direct, direct, center));
            } else {
                const ReadoutWeights lo = lab.readout(center - d / 2);
                const ReadoutWeights hi = lab.readout(center + d / 2);
                blended.push_back(interpolate(lo, hi, center));
            }
        }
        std::vector<const ReadoutWeights*> all{&direct};
        for (const auto& b : blended) all.push_back(&b);
        const std::vector<ErrorReport> reps = lab.evaluate(all, center);
        for (std::size_t k = 0; k < spacings.size(); ++k) {
            InterpolationRow row;
            row.spacing = spacings[k];
            row.q = center;
            row.q_lo = center - spacings[k] / 2;
            row.q_hi = center + spacings[k] / 2;
            row.direct = normalized_or_nan(reps[0]);
            row.interpolated = normalized_or_nan(reps[k + 1]);
            per_seed[si].push_back(row);
        }
    });

    std::vector<InterpolationRow> out;
    for (std::size_t k = 0; k < spacings.size(); ++k) {
        std::vector<InterpolationRow> rows;
        for (const auto& s : per_seed) rows.push_back(s[k]);
        out.push_back(average_rows(rows));
    }
    return out;
}

std::vector<InterpolationRow> bank_interpolation(const ScenarioSpec& spec, const std::vector<double>& bank_alphas,
                                                 const std::vector<double>& queries, int jobs) {
    spec.validate();
    if (bank_alphas.size() < 2) throw InvalidArgument("bank_interpolation: bank needs at least two readouts");
    std::vector<double> grid = bank_alphas;
    std::sort(grid.begin(), grid.end());
    for (double q : queries) {
        if (q < grid.front() || q > grid.back()) {
            throw InvalidArgument("bank_interpolation: query " + std::to_string(q) + " outside the bank range");
        }
    }
    const std::vector<std::uint64_t> seeds = spec.seeds();
    std::vector<std::vector<InterpolationRow>> per_seed(seeds.size());
    parallel_for(seeds.size(), jobs, [&](std::size_t si) {
        ReadoutLab lab(spec, seeds[si]);
        const ReadoutBank bank = lab.bank(grid);
        for (double q : queries) {
            const ReadoutWeights direct = lab.readout(q);
            const ReadoutWeights blended = bank.select(q);
            const std::vector<ErrorReport> reps = lab.evaluate({&direct, &blended}, q);
            InterpolationRow row;
            row.q = q;
            const auto hi = std::upper_bound(grid.begin(), grid.end(), q);
            row.q_hi = hi == grid.end() ? grid.back() : *hi;
            row.q_lo = hi == grid.begin() ? grid.front() : *(hi - 1);
            row.spacing = row.q_hi - row.q_lo;
            row.direct = normalized_or_nan(reps[0]);
            row.interpolated = normalized_or_nan(reps[1]);
            per_seed[si].push_back(row);
        }
    });

    std::vector<InterpolationRow> out;
    for (std::size_t k = 0; k < queries.size(); ++k) {
        std::vector<InterpolationRow> rows;
        for (const auto& s : per_seed) rows.push_back(s[k]);
        out.push_back(average_rows(rows));
    }
    return out;
}

} // namespace rcsep
