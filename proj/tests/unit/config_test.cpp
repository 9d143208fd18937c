#include <doctest.h>

#include "rcsep/config.hpp"
#include "rcsep/error.hpp"

#include <filesystem>
#include <fstream>

using namespace rcsep;

namespace {

std::string error_key(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<no error>";
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("empty document gives the documented defaults") {
    const RunConfig cfg = parse_config("");
    const ScenarioSpec& s = cfg.scenario;
    CHECK(s.kind == ScenarioKind::diff_params);
    CHECK(s.reservoir.n_nodes == 2000);
    CHECK(s.reservoir.spectral_radius == 0.9);
    CHECK(s.reservoir.leakage == 0.3);
    CHECK(s.reservoir.input_scale == 0.13);
    CHECK(s.reservoir.sparsity == 0.95);
    CHECK(s.train_len == 50000);
    CHECK(s.test_len == 5000);
    CHECK(s.seg_len == 500);
    CHECK(s.overlap == 250);
    CHECK_FALSE(s.alpha.has_value());
    CHECK(cfg.out_dir == "out");
    CHECK(cfg.sweep.alphas.size() == 9);
    CHECK(cfg.estimator.config.reservoir.n_nodes == 1000);
}

TEST_CASE("scenario keys") {
    const RunConfig cfg = parse_config(R"(
        # comment line
        kind = diff_speed
        n_nodes = 100       # trailing comment
        spectral_radius = 0.8
        leakage = 0.5
        input_scale = 0.2
        bias = 0.1
        sparsity = 0.9
        washout = 50
        ridge_reg = 1e-4
        train_len = 2000
        test_len = 800
        alpha = 0.25
        component = z
        seed = 7
        repeats = 3
        seg_len = 200
        input_units = normalized
        renormalize_mix = true
        out = results
    )");
    const ScenarioSpec& s = cfg.scenario;
    CHECK(s.kind == ScenarioKind::diff_speed);
    CHECK(s.p1.speed == 1.2);  // the preset survives the other keys
    CHECK(s.reservoir.n_nodes == 100);
    CHECK(s.reservoir.spectral_radius == 0.8);
    CHECK(s.reservoir.leakage == 0.5);
    CHECK(s.reservoir.input_scale == 0.2);
    CHECK(s.reservoir.bias == 0.1);
    CHECK(s.reservoir.sparsity == 0.9);
    CHECK(s.reservoir.washout == 50);
    CHECK(s.ridge_reg == 1e-4);
    CHECK(s.train_len == 2000);
    CHECK(s.test_len == 800);
    CHECK(*s.alpha == 0.25);
    CHECK(s.component == Component::z);
    CHECK(s.seed == 7);
    CHECK(s.repeats == 3);
    CHECK(s.seg_len == 200);
    CHECK(s.overlap == 100);
    CHECK(s.input_units == InputUnits::normalized);
    CHECK(s.renormalize_mix);
    CHECK(cfg.out_dir == "results");
}

TEST_CASE("kind applies first regardless of position") {
    const RunConfig cfg = parse_config("rho2 = 30\nkind = matched_spectra\n");
    CHECK(cfg.scenario.kind == ScenarioKind::matched_spectra);
    CHECK(cfg.scenario.p2.rho == 30.0);
    CHECK(cfg.scenario.p2.speed == 0.9);
}

TEST_CASE("sections") {
    const RunConfig cfg = parse_config(R"(
        alpha = 0.5
        [sweep]
        alphas = 0.25, 0.5,0.75
        [estimator]
        n_nodes = 80
        grid_step = 0.25
        test_stream = 4
        [interp]
        center = 0.4
        spacings = 0, 0.1
        bank = 0.2, 0.3
        queries = 0.25
        [generate]
        n_samples = 10
        [scenario]
        seed = 3
    )");
    CHECK(cfg.sweep.alphas == std::vector<double>{0.25, 0.5, 0.75});
    CHECK(cfg.estimator.config.reservoir.n_nodes == 80);
    CHECK(cfg.estimator.config.grid == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(cfg.estimator.test_stream == 4);
    CHECK(cfg.interp.center == 0.4);
    CHECK(cfg.interp.spacings == std::vector<double>{0.0, 0.1});
    CHECK(cfg.interp.bank == std::vector<double>{0.2, 0.3});
    CHECK(cfg.interp.queries == std::vector<double>{0.25});
    CHECK(*cfg.generate.n_samples == 10);
    CHECK(cfg.scenario.seed == 3);
    CHECK(*cfg.scenario.alpha == 0.5);
}

TEST_CASE("errors name the offending key") {
    CHECK(error_key("n_nodez = 3") == "n_nodez");
    CHECK(error_key("alpha = half") == "alpha");
    CHECK(error_key("n_nodes = -5") == "n_nodes");
    CHECK(error_key("alpha = 0.1\nalpha = 0.2") == "alpha");
    CHECK(error_key("kind = other") == "kind");
    CHECK(error_key("component = w") == "component");
    CHECK(error_key("renormalize_mix = maybe") == "renormalize_mix");
    CHECK(error_key("[plots]") == "plots");
    CHECK(error_key("[sweep]\nalphas =") == "alphas");
    CHECK(error_key("[estimator]\ngrid_step = 0.3") == "grid_step");
    CHECK(error_key("[estimator]\ngrid = 0, 1\ngrid_step = 0.5") == "grid");
    CHECK(error_key("[generate]\nn_samples = 0") == "n_samples");
    CHECK(error_key("just words") == "just words");
    CHECK(error_key("alpha = 0.5") == "<no error>");
}

TEST_CASE("load_config") {
    const auto path = std::filesystem::temp_directory_path() / "rcsep_config_test.cfg";
    std::ofstream(path) << "alpha = 0.3\n";
    CHECK(*load_config(path).scenario.alpha == 0.3);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_config(path), IoError);
}

}
