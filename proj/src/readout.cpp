#include "rcsep/readout.hpp"

#include "rcsep/error.hpp"

#include <json.hpp>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace rcsep {

RidgeAccumulator::RidgeAccumulator(Eigen::Index n_nodes, Eigen::Index n_outputs)
    : gram_(Matrix::Zero(n_nodes, n_nodes)), cross_(Matrix::Zero(n_outputs, n_nodes)) {}

void RidgeAccumulator::add(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& targets) {
    if (states.rows() != gram_.rows() || targets.rows() != cross_.rows() || states.cols() != targets.cols()) {
        throw InvalidArgument("RidgeAccumulator::add: dimension mismatch");
    }
    gram_.selfadjointView<Eigen::Lower>().rankUpdate(states);
    cross_.noalias() += targets * states.transpose();
    count_ += states.cols();
}

void RidgeAccumulator::add_constant_target(const Eigen::Ref<const Matrix>& states, const Vector& target) {
    if (states.rows() != gram_.rows() || target.size() != cross_.rows()) {
        throw InvalidArgument("RidgeAccumulator::add_constant_target: dimension mismatch");
    }
    gram_.selfadjointView<Eigen::Lower>().rankUpdate(states);
    const Vector state_sum = states.rowwise().sum();
    cross_.noalias() += target * state_sum.transpose();
    count_ += states.cols();
}

ReadoutWeights RidgeAccumulator::solve(double reg) const {
    if (!(reg >= 0.0)) throw InvalidArgument("train_ridge: regularization must be >= 0");
    if (count_ < 1) throw InvalidArgument("train_ridge: no training samples");

    const Eigen::Index n = gram_.rows();
    Matrix a = gram_.selfadjointView<Eigen::Lower>();
    a.diagonal().array() += reg;

    ReadoutWeights out;
    out.ridge_reg = reg;

    if (reg > 0.0) {
        Eigen::LLT<Matrix, Eigen::Lower> llt(a);
        if (llt.info() == Eigen::Success) {
            out.w_out = llt.solve(cross_.transpose()).transpose();
            out.solver = RidgeSolver::cholesky;
            return out;
        }
    } else {
        Eigen::LDLT<Matrix, Eigen::Lower> ldlt(a);
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
            const Vector d = ldlt.vectorD().cwiseAbs();
            const double max_d = d.maxCoeff();
            if (max_d > 0.0 && d.minCoeff() > max_d * static_cast<double>(n) * std::numeric_limits<double>::epsilon()) {
                out.w_out = ldlt.solve(cross_.transpose()).transpose();
                out.solver = RidgeSolver::cholesky;
                return out;
            }
        }
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
    out.w_out = cod.solve(cross_.transpose()).transpose();
    out.solver = RidgeSolver::pseudo_inverse;
    return out;
}

ReadoutWeights train_ridge(const StateTrajectory& r, const Matrix& s, double reg) {
    if (s.cols() != r.steps()) {
        throw InvalidArgument("train_ridge: states have " + std::to_string(r.steps()) + " columns but targets have " +
                              std::to_string(s.cols()));
    }
    if (r.steps() < 1) throw InvalidArgument("train_ridge: need at least one sample");
    RidgeAccumulator acc(r.states.rows(), s.rows());
    acc.add(r.states, s);
    return acc.solve(reg);
}

ReadoutWeights train_ridge(const StateTrajectory& r, const TimeSeries& target, double reg) {
    const Eigen::Map<const Eigen::RowVectorXd> s(target.samples.data(), static_cast<Eigen::Index>(target.size()));
    return train_ridge(r, Matrix(s), reg);
}

Matrix predict_all(const ReadoutWeights& w, const StateTrajectory& r) {
    if (w.w_out.cols() != r.states.rows()) {
        throw InvalidArgument("predict: readout expects " + std::to_string(w.w_out.cols()) + " nodes, states have " +
                              std::to_string(r.states.rows()));
    }
    return w.w_out * r.states;
}

TimeSeries predict(const ReadoutWeights& w, const StateTrajectory& r) {
    const Matrix all = predict_all(w, r);
    TimeSeries out;
    out.dt = r.dt;
    out.samples.resize(static_cast<std::size_t>(all.cols()));
    for (Eigen::Index t = 0; t < all.cols(); ++t) out.samples[static_cast<std::size_t>(t)] = all(0, t);
    return out;
}

ReadoutWeights interpolate(const ReadoutWeights& lo, const ReadoutWeights& hi, double q) {
    if (lo.reservoir_identity != hi.reservoir_identity) {
        throw InvalidArgument("interpolate: readouts were trained on different reservoirs");
    }
    if (!lo.trained_alpha || !hi.trained_alpha) {
        throw InvalidArgument("interpolate: both readouts must carry their trained alpha");
    }
    if (lo.w_out.rows() != hi.w_out.rows() || lo.w_out.cols() != hi.w_out.cols()) {
        throw InvalidArgument("interpolate: readout shapes differ");
    }
    const double q_lo = *lo.trained_alpha;
    const double q_hi = *hi.trained_alpha;
    if (q_lo > q_hi) throw InvalidArgument("interpolate: lower readout has the larger alpha");
    if (q < q_lo || q > q_hi) {
        throw InvalidArgument("interpolate: q = " + std::to_string(q) + " outside [" + std::to_string(q_lo) + ", " +
                              std::to_string(q_hi) + "]");
    }

    ReadoutWeights out = lo;
    out.trained_alpha = q;
    if (q == q_lo) return out;
    if (q == q_hi) {
        out.w_out = hi.w_out;
        return out;
    }
    const double span = q_hi - q_lo;
    out.w_out = ((q - q_lo) / span) * hi.w_out + ((q_hi - q) / span) * lo.w_out;
    out.ridge_reg = std::max(lo.ridge_reg, hi.ridge_reg);
    return out;
}

ReadoutWeights ReadoutBank::select(double q) const {
    if (readouts.empty()) throw InvalidArgument("ReadoutBank::select: empty bank");
    if (q <= *readouts.front().trained_alpha) return readouts.front();
    if (q >= *readouts.back().trained_alpha) return readouts.back();
    for (std::size_t i = 0; i + 1 < readouts.size(); ++i) {
        const double lo = *readouts[i].trained_alpha;
        const double hi = *readouts[i + 1].trained_alpha;
        if (q == lo) return readouts[i];
        if (q < hi) return interpolate(readouts[i], readouts[i + 1], q);
    }
    return readouts.back();
}

namespace {

std::string readout_file_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "readout_%03zu.csv", i);
    return buf;
}

void read_bank_entries(const nlohmann::json& manifest, const std::filesystem::path& dir, ReadoutBank& bank) {
    bank.reservoir_seed = manifest.at("reservoir_seed").get<std::uint64_t>();
    for (const auto& entry : manifest.at("readouts")) {
        ReadoutWeights r;
        const auto rows = entry.at("n_outputs").get<Eigen::Index>();
        const auto cols = entry.at("n_nodes").get<Eigen::Index>();
        if (!entry.at("alpha").is_null()) r.trained_alpha = entry.at("alpha").get<double>();
        r.ridge_reg = entry.at("ridge_reg").get<double>();
        r.reservoir_identity = entry.at("reservoir_identity").get<std::uint64_t>();
        r.solver = entry.at("solver").get<std::string>() == "cholesky" ? RidgeSolver::cholesky
                                                                        : RidgeSolver::pseudo_inverse;
        r.w_out.resize(rows, cols);

        const auto path = dir / entry.at("file").get<std::string>();
        std::ifstream in(path);
        if (!in) throw IoError("load_bank: cannot read " + path.string());
        std::string line;
        for (Eigen::Index row = 0; row < rows; ++row) {
            if (!std::getline(in, line)) throw IoError("load_bank: truncated " + path.string());
            std::istringstream ls(line);
            std::string cell;
            for (Eigen::Index col = 0; col < cols; ++col) {
                if (!std::getline(ls, cell, ',')) throw IoError("load_bank: short row in " + path.string());
                r.w_out(row, col) = std::strtod(cell.c_str(), nullptr);
            }
        }
        bank.readouts.push_back(std::move(r));
    }
}

} // namespace

void save_bank(const ReadoutBank& bank, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("save_bank: cannot create " + dir.string() + ": " + ec.message());

    nlohmann::json manifest;
    manifest["reservoir_seed"] = bank.reservoir_seed;
    manifest["readouts"] = nlohmann::json::array();
    char buf[64];
    for (std::size_t i = 0; i < bank.readouts.size(); ++i) {
        const ReadoutWeights& r = bank.readouts[i];
        const std::string file = readout_file_name(i);
        std::ofstream out(dir / file);
        if (!out) throw IoError("save_bank: cannot write " + (dir / file).string());
        for (Eigen::Index row = 0; row < r.w_out.rows(); ++row) {
            for (Eigen::Index col = 0; col < r.w_out.cols(); ++col) {
                std::snprintf(buf, sizeof buf, "%.17g", r.w_out(row, col));
                out << (col ? "," : "") << buf;
            }
            out << '\n';
        }
        nlohmann::json entry;
        entry["file"] = file;
        entry["n_nodes"] = r.w_out.cols();
        entry["n_outputs"] = r.w_out.rows();
        entry["alpha"] = r.trained_alpha ? nlohmann::json(*r.trained_alpha) : nlohmann::json(nullptr);
        entry["ridge_reg"] = r.ridge_reg;
        entry["reservoir_identity"] = r.reservoir_identity;
        entry["solver"] = r.solver == RidgeSolver::cholesky ? "cholesky" : "pseudo_inverse";
        manifest["readouts"].push_back(entry);
    }
    std::ofstream m(dir / "manifest.json");
    if (!m) throw IoError("save_bank: cannot write manifest");
    m << manifest.dump(2) << '\n';
}

ReadoutBank load_bank(const std::filesystem::path& dir) {
    std::ifstream m(dir / "manifest.json");
    if (!m) throw IoError("load_bank: cannot read " + (dir / "manifest.json").string());
    nlohmann::json manifest;
    try {
        m >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("load_bank: malformed manifest: ") + e.what());
    }

    ReadoutBank bank;
    try {
        read_bank_entries(manifest, dir, bank);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("load_bank: malformed manifest: ") + e.what());
    }
    std::sort(bank.readouts.begin(), bank.readouts.end(),
              [](const ReadoutWeights& a, const ReadoutWeights& b) { return a.trained_alpha < b.trained_alpha; });
    return bank;
}

} // namespace rcsep
