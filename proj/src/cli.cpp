#include "rcsep/cli.hpp"

#include "rcsep/error.hpp"
#include "rcsep/random.hpp"

#include "csv.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <sstream>

namespace rcsep {

namespace fs = std::filesystem;
using detail::CsvWriter;

namespace {

void prepare_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
    }
}

double require_alpha(const ScenarioSpec& s, const char* command) {
    if (!s.alpha) {
        throw ConfigError("alpha", std::string("missing required key 'alpha' for ") + command + " (scenario " +
                                       to_string(s.kind) + ")");
    }
    return *s.alpha;
}

void write_series(const fs::path& path, const TimeSeries& s, std::size_t first_index = 0) {
    CsvWriter csv(path, {"t", "value"});
    for (std::size_t i = 0; i < s.size(); ++i) {
        csv.cell(static_cast<double>(first_index + i) * s.dt).cell(s[i]);
        csv.end_row();
    }
    csv.close();
}

void write_trajectory(const fs::path& path, const std::array<TimeSeries, 3>& xyz) {
    CsvWriter csv(path, {"t", "x", "y", "z"});
    for (std::size_t i = 0; i < xyz[0].size(); ++i) {
        csv.cell(static_cast<double>(i) * xyz[0].dt).cell(xyz[0][i]).cell(xyz[1][i]).cell(xyz[2][i]);
        csv.end_row();
    }
    csv.close();
}

void report_row(CsvWriter& csv, const ScenarioSpec& s, double alpha, std::uint64_t seed, const ErrorReport& r) {
    csv.cell(to_string(s.kind)).cell(alpha).cell(seed).cell(r.tag).cell(r.e_normalized).cell(r.e_numerator);
    csv.cell(r.zeta_star).cell(static_cast<std::uint64_t>(r.n_samples));
    csv.end_row();
}

const std::initializer_list<std::string> kReportHeader{"scenario", "alpha",     "seed", "estimator",
                                                      "e_norm",   "e_num",     "zeta_star", "n"};

std::string sweep_stem(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::diff_params: return "fig2";
    case ScenarioKind::diff_speed: return "fig3";
    case ScenarioKind::matched_spectra: return "fig4";
    case ScenarioKind::custom: return "sweep";
    }
    return "sweep";
}

AlphaEstimatorConfig estimator_config(const RunConfig& cfg) {
    AlphaEstimatorConfig c = cfg.estimator.config;
    const ScenarioSpec& s = cfg.scenario;
    c.p1 = s.p1;
    c.p2 = s.p2;
    c.component = s.component;
    c.transient_steps = s.transient_steps;
    c.seed = s.seed;
    c.reservoir.seed = s.seed;
    return c;
}

void write_interp(const fs::path& path, const std::vector<InterpolationRow>& rows) {
    CsvWriter csv(path, {"spacing", "q", "q_lo", "q_hi", "direct", "interpolated", "ratio"});
    for (const auto& r : rows) {
        csv.cell(r.spacing).cell(r.q).cell(r.q_lo).cell(r.q_hi).cell(r.direct).cell(r.interpolated).cell(r.ratio);
        csv.end_row();
    }
    csv.close();
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

} // namespace

void cmd_generate(const RunConfig& cfg, int /*jobs*/) {
    const ScenarioSpec& s = cfg.scenario;
    const double alpha = require_alpha(s, "generate");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha", "'alpha' must lie in [0, 1]");
    const std::size_t n = cfg.generate.n_samples.value_or(s.reservoir.washout + s.train_len + s.test_len);
    // Statistics come from the training prefix, exactly as in the separation runs.
    const std::size_t fit = std::min(n, s.reservoir.washout + s.train_len);
    prepare_out_dir(cfg.out_dir);

    GenerateOptions gen;
    gen.transient_steps = s.transient_steps;
    const auto xyz1 = generate(s.p1, perturbed_initial_state(mix_seed(s.seed, 1)), n, gen);
    const auto xyz2 = generate(s.p2, perturbed_initial_state(mix_seed(s.seed, 2)), n, gen);
    const auto c = static_cast<int>(s.component);

    ScenarioSignals sig;
    sig.train_len = fit;
    sig.test_len = n - fit;
    sig.s1 = normalize_with(xyz1[c], compute_stats(xyz1[c].view().first(fit)));
    sig.s2 = normalize_with(xyz2[c], compute_stats(xyz2[c].view().first(fit)));
    const TimeSeries u = mixture(s, sig, alpha);

    write_series(cfg.out_dir / "s1.csv", sig.s1);
    write_series(cfg.out_dir / "s2.csv", sig.s2);
    write_series(cfg.out_dir / "mixed.csv", u);
    write_trajectory(cfg.out_dir / "trajectory1.csv", xyz1);
    write_trajectory(cfg.out_dir / "trajectory2.csv", xyz2);

    CsvWriter m(cfg.out_dir / "manifest.csv",
                {"file", "scenario", "component", "alpha", "seed", "n_samples", "dt", "norm_samples"});
    m.cell("mixed.csv").cell(to_string(s.kind)).cell(to_string(s.component)).cell(alpha).cell(s.seed);
    m.cell(static_cast<std::uint64_t>(n)).cell(u.dt).cell(static_cast<std::uint64_t>(fit));
    m.end_row();
    m.close();
}

void cmd_separate(const RunConfig& cfg, int jobs) {
    const ScenarioSpec& s = cfg.scenario;
    const double alpha = require_alpha(s, "separate");
    s.validate();
    prepare_out_dir(cfg.out_dir);

    const std::vector<std::uint64_t> seeds = s.seeds();
    std::vector<std::optional<SeparationResult>> results(seeds.size());
    parallel_for(seeds.size(), jobs, [&](std::size_t i) {
        SeparationResult r = run_separation(s, seeds[i]);
        if (i > 0) {
            // Only the first seed's series are exported.
            r.actual = r.rc_prediction = r.wiener_prediction = r.mixed = TimeSeries{};
        }
        results[i] = std::move(r);
    });

    const SeparationResult& first = *results.front();
    const std::size_t t0 = s.reservoir.washout + s.train_len;
    CsvWriter pred(cfg.out_dir / "predictions.csv", {"t", "actual", "rc", "wiener"});
    for (std::size_t i = 0; i < first.actual.size(); ++i) {
        pred.cell(static_cast<double>(t0 + i) * first.actual.dt).cell(first.actual[i]);
        pred.cell(first.rc_prediction[i]).cell(first.wiener_prediction[i]);
        pred.end_row();
    }
    pred.close();

    CsvWriter rep(cfg.out_dir / "report.csv", kReportHeader);
    std::vector<double> rc, wiener;
    for (const auto& r : results) {
        report_row(rep, s, alpha, r->seed, r->rc);
        report_row(rep, s, alpha, r->seed, r->wiener);
        if (r->rc.e_normalized) rc.push_back(*r->rc.e_normalized);
        if (r->wiener.e_normalized) wiener.push_back(*r->wiener.e_normalized);
    }
    rep.close();

    CsvWriter sum(cfg.out_dir / "summary.csv", {"scenario", "alpha", "estimator", "e_norm_mean", "e_norm_se", "n_seeds"});
    for (const auto& [name, values] : {std::pair{"rc", summarize(rc)}, std::pair{"wiener", summarize(wiener)}}) {
        sum.cell(to_string(s.kind)).cell(alpha).cell(name);
        if (values.count > 0) sum.cell(values.mean).cell(values.std_error);
        else sum.cell("nan").cell("nan");
        sum.cell(static_cast<std::uint64_t>(values.count));
        sum.end_row();
    }
    sum.close();

    write_filter_csv(first.filter, cfg.out_dir / "filter.csv");
}

void cmd_sweep(const RunConfig& cfg, int jobs) {
    const ScenarioSpec& s = cfg.scenario;
    s.validate();
    prepare_out_dir(cfg.out_dir);
    const SweepResult res = sweep_alpha(s, cfg.sweep.alphas, jobs);
    const std::string stem = sweep_stem(s.kind);

    CsvWriter table(cfg.out_dir / (stem + ".csv"),
                    {"estimator", "alpha", "e_norm_mean", "e_norm_se", "e_num_mean", "e_num_se", "n_defined"});
    for (const char* est : {"rc", "wiener"}) {
        const bool is_rc = std::string(est) == "rc";
        for (const SweepRow& row : res.rows) {
            const Summary& norm = is_rc ? row.rc_normalized : row.wiener_normalized;
            const Summary& num = is_rc ? row.rc_numerator : row.wiener_numerator;
            table.cell(est).cell(row.alpha);
            if (norm.count > 0) table.cell(norm.mean).cell(norm.std_error);
            else table.cell("nan").cell("nan");
            table.cell(num.mean).cell(num.std_error).cell(static_cast<std::uint64_t>(norm.count));
            table.end_row();
        }
    }
    table.close();

    CsvWriter runs(cfg.out_dir / (stem + "_runs.csv"), kReportHeader);
    for (const SweepRun& r : res.runs) {
        report_row(runs, s, r.alpha, r.seed, r.rc);
        report_row(runs, s, r.alpha, r.seed, r.wiener);
    }
    runs.close();

    if (s.kind == ScenarioKind::matched_spectra) {
        ScenarioSpec zs = s;
        zs.component = Component::z;
        const ScenarioSignals sig = prepare_signals(zs, s.seed);
        const PsdOverlay psd = psd_overlay(sig.s1.slice(sig.washout, sig.train_len),
                                           sig.s2.slice(sig.washout, sig.train_len), s.seg_len);
        write_spectra_csv({"z1", "z2"}, {psd.first, psd.second}, cfg.out_dir / "fig4a_psd.csv");
        CsvWriter ov(cfg.out_dir / "fig4a_overlap.csv", {"seed", "overlap_score"});
        ov.cell(s.seed).cell(psd.overlap_score);
        ov.end_row();
        ov.close();
    }
}

void cmd_estimate_alpha(const RunConfig& cfg, int jobs, std::ostream& log) {
    const AlphaEstimatorConfig c = estimator_config(cfg);
    prepare_out_dir(cfg.out_dir);
    const AlphaEstimator est = train_alpha_estimator(c);
    const std::vector<TimeSeries> tests =
        alpha_test_mixtures(c, c.reservoir.washout + c.test_len, cfg.estimator.test_stream);
    std::vector<AlphaEstimate> estimates(tests.size());
    parallel_for(tests.size(), jobs, [&](std::size_t i) { estimates[i] = estimate_alpha_detailed(est, tests[i]); });

    CsvWriter fig(cfg.out_dir / "fig5.csv", {"true_alpha", "corrected_estimate"});
    for (std::size_t i = 0; i < tests.size(); ++i) {
        fig.cell(c.grid[i]).cell(estimates[i].corrected);
        fig.end_row();
    }
    fig.close();

    CsvWriter raw(cfg.out_dir / "fig5_raw.csv", {"set", "true_alpha", "raw", "corrected"});
    for (std::size_t i = 0; i < est.raw_train.size(); ++i) {
        raw.cell("train").cell(c.grid[i]).cell(est.raw_train[i]);
        raw.cell(std::clamp(est.correct(est.raw_train[i]), 0.0, 1.0));
        raw.end_row();
    }
    for (std::size_t i = 0; i < tests.size(); ++i) {
        raw.cell("test").cell(c.grid[i]).cell(estimates[i].raw).cell(estimates[i].corrected);
        raw.end_row();
    }
    raw.close();

    const auto [lo, hi] = std::minmax_element(est.raw_train.begin(), est.raw_train.end());
    CsvWriter poly(cfg.out_dir / "fig5_poly.csv", {"c0", "c1", "c2", "c3", "raw_min", "raw_max", "monotone"});
    for (double coef : est.correction) poly.cell(coef);
    poly.cell(*lo).cell(*hi).cell(est.monotone ? "true" : "false");
    poly.end_row();
    poly.close();
    if (!est.monotone) {
        log << "rcsep: warning[monotone]: correction cubic decreases somewhere on the observed raw range\n";
    }
}

void cmd_interp_study(const RunConfig& cfg, int jobs) {
    const ScenarioSpec& s = cfg.scenario;
    s.validate();
    prepare_out_dir(cfg.out_dir);
    write_interp(cfg.out_dir / "fig6a.csv", interpolation_study(s, cfg.interp.center, cfg.interp.spacings, jobs));
    write_interp(cfg.out_dir / "fig6b.csv", bank_interpolation(s, cfg.interp.bank, cfg.interp.queries, jobs));
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Separate mixtures of chaotic signals with an echo-state reservoir and a Wiener filter."};
    app.name("rcsep");
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    app.add_option("--config", config_path, "Configuration file (key = value)")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (overrides the config)");
    app.add_option("--seed", seed, "Master seed (overrides the config)");
    app.add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1, 1024));

    auto* generate_cmd = app.add_subcommand("generate", "Write the component and mixed signals");
    auto* separate_cmd = app.add_subcommand("separate", "Run one known-alpha separation per seed");
    auto* sweep_cmd = app.add_subcommand("sweep", "Error versus mixing fraction for both estimators");
    auto* estimate_cmd = app.add_subcommand("estimate-alpha", "Train and test the mixing-fraction estimator");
    auto* interp_cmd = app.add_subcommand("interp-study", "Compare interpolated and directly trained readouts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "rcsep: error[usage]: " << one_line(e.what()) << '\n';
        return kExitConfig;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed) cfg.scenario.seed = *seed;

        if (generate_cmd->parsed()) cmd_generate(cfg, jobs);
        else if (separate_cmd->parsed()) cmd_separate(cfg, jobs);
        else if (sweep_cmd->parsed()) cmd_sweep(cfg, jobs);
        else if (estimate_cmd->parsed()) cmd_estimate_alpha(cfg, jobs, err);
        else if (interp_cmd->parsed()) cmd_interp_study(cfg, jobs);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "rcsep: error[config]: key=" << e.key() << ": " << one_line(e.what()) << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "rcsep: error[io]: " << one_line(e.what()) << '\n';
        return kExitIo;
    } catch (const NumericalError& e) {
        err << "rcsep: error[numerical]: " << one_line(e.what()) << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "rcsep: error[invalid]: " << one_line(e.what()) << '\n';
        return kExitFailure;
    }
}

} // namespace rcsep
