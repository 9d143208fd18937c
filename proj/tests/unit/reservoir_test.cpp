#include <doctest.h>

#include "rcsep/error.hpp"
#include "rcsep/pipeline.hpp"
#include "rcsep/random.hpp"
#include "rcsep/reservoir.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace rcsep;

namespace {

ReservoirConfig small_config(int n = 50) {
    ReservoirConfig cfg;
    cfg.n_nodes = n;
    cfg.sparsity = 0.8;
    cfg.washout = 10;
    cfg.seed = 4;
    return cfg;
}

TimeSeries ramp(std::size_t n) {
    TimeSeries s;
    for (std::size_t i = 0; i < n; ++i) s.samples.push_back(std::sin(0.1 * static_cast<double>(i)));
    return s;
}

double dense_radius(const Matrix& m) {
    return Eigen::EigenSolver<Matrix>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace

TEST_SUITE("reservoir") {

TEST_CASE("config validation") {
    ReservoirConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    auto bad = [](auto mutate) {
        ReservoirConfig c;
        mutate(c);
        return c;
    };
    CHECK_THROWS_AS(bad([](auto& c) { c.n_nodes = 0; }).validate(), InvalidArgument);
    CHECK_THROWS_AS(bad([](auto& c) { c.spectral_radius = 0.0; }).validate(), InvalidArgument);
    CHECK_THROWS_AS(bad([](auto& c) { c.leakage = 1.5; }).validate(), InvalidArgument);
    CHECK_THROWS_AS(bad([](auto& c) { c.input_scale = -0.1; }).validate(), InvalidArgument);
    CHECK_THROWS_AS(bad([](auto& c) { c.sparsity = -0.1; }).validate(), InvalidArgument);
    CHECK_THROWS_AS(bad([](auto& c) { c.bias = NAN; }).validate(), InvalidArgument);
}

TEST_CASE("build_weights hits the target radius and respects the input bound") {
    const ReservoirConfig cfg = small_config(200);
    const ReservoirWeights w = build_weights(cfg);
    CHECK(w.n_nodes() == 200);
    CHECK(w.input_dim() == 1);
    CHECK(w.w_in.cwiseAbs().maxCoeff() <= cfg.input_scale);
    CHECK(std::abs(w.realized_radius - cfg.spectral_radius) < 1e-6);
    CHECK(std::abs(dense_radius(Matrix(w.w_res)) - cfg.spectral_radius) < 1e-4);

    // About 80% of the recurrent entries are masked out.
    const double density = static_cast<double>(w.w_res.nonZeros()) / (200.0 * 200.0);
    CHECK(density > 0.17);
    CHECK(density < 0.23);
}

TEST_CASE("build_weights is a deterministic function of seed and config") {
    const ReservoirConfig cfg = small_config();
    const ReservoirWeights a = build_weights(cfg);
    const ReservoirWeights b = build_weights(cfg);
    CHECK(a.w_in == b.w_in);
    CHECK(Matrix(a.w_res) == Matrix(b.w_res));
    CHECK(a.identity == b.identity);

    ReservoirConfig other = cfg;
    other.seed = 5;
    const ReservoirWeights c = build_weights(other);
    CHECK(a.w_in != c.w_in);
    CHECK(a.identity != c.identity);

    other = cfg;
    other.bias = 0.5;
    CHECK(reservoir_identity(other, 1) != reservoir_identity(cfg, 1));
    CHECK(reservoir_identity(cfg, 2) != reservoir_identity(cfg, 1));
}

TEST_CASE("fully masked recurrent matrix is rejected") {
    ReservoirConfig cfg = small_config(5);
    cfg.sparsity = 1.0;
    CHECK_THROWS_AS(build_weights(cfg), InvalidArgument);
    CHECK_THROWS_AS(build_weights(small_config(), 0), InvalidArgument);
}

TEST_CASE("spectral_radius against the dense eigensolver") {
    SpectralRadiusOptions arnoldi;
    arnoldi.dense_below = 0;
    Rng rng(17);
    for (int n : {7, 60, 300, 500}) {
        CAPTURE(n);
        Matrix m(n, n);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1.0, 1.0);
        const double expected = dense_radius(m);
        CHECK(std::abs(spectral_radius(m, arnoldi) - expected) < 1e-4 * expected);
        CHECK(std::abs(spectral_radius(SparseMatrix(m.sparseView()), arnoldi) - expected) < 1e-4 * expected);
    }
    for (int n : {100, 300, 500}) {
        CAPTURE(n);
        ReservoirConfig cfg;
        cfg.n_nodes = n;
        cfg.seed = static_cast<std::uint64_t>(n);
        const ReservoirWeights w = build_weights(cfg);
        CHECK(std::abs(dense_radius(Matrix(w.w_res)) - cfg.spectral_radius) < 1e-4);
    }
    CHECK(spectral_radius(Matrix::Identity(1, 1) * -3.0) == doctest::Approx(3.0));

    SUBCASE("rotation: complex dominant pair") {
        Matrix rot(2, 2);
        rot << 0.0, -2.0, 2.0, 0.0;
        CHECK(spectral_radius(rot) == doctest::Approx(2.0).epsilon(1e-6));
    }
    SUBCASE("zero and non-square matrices") {
        CHECK_THROWS_AS(spectral_radius(Matrix::Zero(3, 3)), InvalidArgument);
        CHECK_THROWS_AS(spectral_radius(Matrix::Ones(2, 3)), InvalidArgument);
    }
}

TEST_CASE("update against a hand computation") {
    ReservoirWeights w;
    w.w_in = Matrix::Constant(2, 1, 0.5);
    Matrix dense(2, 2);
    dense << 0.0, 0.2, -0.1, 0.0;
    w.w_res = dense.sparseView();
    ReservoirConfig cfg;
    cfg.leakage = 0.4;
    cfg.bias = 0.1;
    Vector r(2);
    r << 1.0, -1.0;
    const Vector next = update(r, 2.0, w, cfg);
    CHECK(next(0) == doctest::Approx(0.6 * 1.0 + 0.4 * std::tanh(1.0 - 0.2 + 0.1)));
    CHECK(next(1) == doctest::Approx(0.6 * -1.0 + 0.4 * std::tanh(1.0 - 0.1 + 0.1)));

    cfg.leakage = 0.0;
    CHECK(update(r, 2.0, w, cfg) == r);
    CHECK_THROWS_AS(update(Vector::Zero(3), 1.0, w, cfg), InvalidArgument);
}

TEST_CASE("drive discards the washout and aligns columns with inputs") {
    const ReservoirConfig cfg = small_config();
    const ReservoirWeights w = build_weights(cfg);
    const TimeSeries u = ramp(cfg.washout + 5);
    const StateTrajectory traj = drive(w, cfg, u);
    CHECK(traj.steps() == 5);
    CHECK(traj.dt == u.dt);

    Vector r = Vector::Zero(cfg.n_nodes);
    for (std::size_t i = 0; i < u.size(); ++i) {
        r = update(r, u[i], w, cfg);
        if (i >= cfg.washout) CHECK((traj.states.col(static_cast<Eigen::Index>(i - cfg.washout)) - r).norm() < 1e-12);
    }

    CHECK_THROWS_AS(drive(w, cfg, ramp(cfg.washout)), InvalidArgument);
}

TEST_CASE("drive_blocks delivers the same states for any block size") {
    const ReservoirConfig cfg = small_config();
    const ReservoirWeights w = build_weights(cfg);
    const TimeSeries u = ramp(200);
    const StateTrajectory full = drive(w, cfg, u);
    for (Eigen::Index block : {1, 7, 64, 1000}) {
        Matrix collected(cfg.n_nodes, full.steps());
        Eigen::Index expected_first = 0;
        drive_blocks(w, cfg, u.view(), block, [&](const Eigen::Ref<const Matrix>& b, Eigen::Index first) {
            CHECK(first == expected_first);
            expected_first += b.cols();
            collected.middleCols(first, b.cols()) = b;
        });
        CHECK(expected_first == full.steps());
        CHECK(collected == full.states);
    }
}

TEST_CASE("states stay inside [-1, 1]") {
    ReservoirConfig cfg = small_config();
    cfg.input_scale = 5.0;
    cfg.bias = 2.0;
    const ReservoirWeights w = build_weights(cfg);
    const StateTrajectory traj = drive(w, cfg, ramp(300));
    CHECK(traj.states.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("echo-state washout: initial state is forgotten") {
    // Default hyperparameters (spectral radius 0.9, leakage 0.3) on the
    // realized configuration of the default scenario.
    ScenarioSpec spec = ScenarioSpec::preset(ScenarioKind::diff_params);
    spec.reservoir.n_nodes = 500;
    spec.train_len = 1000;
    spec.test_len = 500;
    const ScenarioSignals sig = prepare_signals(spec, 0);
    const ReservoirConfig cfg = realized_reservoir(spec, sig, 0);
    REQUIRE(cfg.spectral_radius == 0.9);
    REQUIRE(cfg.leakage == 0.3);
    const ReservoirWeights w = build_weights(cfg);
    const TimeSeries u = mixture(spec, sig, 0.5);

    Rng rng(99);
    Vector a = Vector::Zero(cfg.n_nodes);
    Vector b(cfg.n_nodes);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.uniform(-1.0, 1.0);
    for (std::size_t t = 0; t < cfg.washout; ++t) {
        a = update(a, u[t], w, cfg);
        b = update(b, u[t], w, cfg);
    }
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-6);
}

}
