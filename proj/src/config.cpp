#include "rcsep/config.hpp"

#include "rcsep/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace rcsep {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError(key, "'" + key + "': expected a number, got '" + value + "'");
    return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(key, "'" + key + "': expected a non-negative integer, got '" + value + "'");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError(key, "'" + key + "': expected true or false, got '" + value + "'");
}

InputUnits units(const std::string& key, const std::string& value) {
    try {
        return parse_input_units(value);
    } catch (const InvalidArgument& e) {
        throw ConfigError(key, e.what());
    }
}

using Entries = std::map<std::string, std::string>;

// Keys shared by the scenario and estimator reservoirs.
bool apply_reservoir_key(ReservoirConfig& r, double& ridge_reg, std::size_t& train_len, std::size_t& test_len,
                         const std::string& key, const std::string& value) {
    if (key == "n_nodes") r.n_nodes = static_cast<int>(to_unsigned(key, value));
    else if (key == "spectral_radius") r.spectral_radius = to_double(key, value);
    else if (key == "leakage") r.leakage = to_double(key, value);
    else if (key == "input_scale") r.input_scale = to_double(key, value);
    else if (key == "bias") r.bias = to_double(key, value);
    else if (key == "sparsity") r.sparsity = to_double(key, value);
    else if (key == "washout") r.washout = to_unsigned(key, value);
    else if (key == "ridge_reg") ridge_reg = to_double(key, value);
    else if (key == "train_len") train_len = to_unsigned(key, value);
    else if (key == "test_len") test_len = to_unsigned(key, value);
    else return false;
    return true;
}

bool apply_lorenz_key(ScenarioSpec& s, const std::string& key, const std::string& value) {
    static const std::map<std::string, std::pair<int, double LorenzParams::*>> fields{
        {"sigma1", {1, &LorenzParams::sigma}}, {"rho1", {1, &LorenzParams::rho}},
        {"beta1", {1, &LorenzParams::beta}},   {"speed1", {1, &LorenzParams::speed}},
        {"sigma2", {2, &LorenzParams::sigma}}, {"rho2", {2, &LorenzParams::rho}},
        {"beta2", {2, &LorenzParams::beta}},   {"speed2", {2, &LorenzParams::speed}},
    };
    const auto it = fields.find(key);
    if (it == fields.end()) return false;
    LorenzParams& p = it->second.first == 1 ? s.p1 : s.p2;
    p.*(it->second.second) = to_double(key, value);
    return true;
}

void apply_scenario(RunConfig& cfg, const Entries& entries) {
    ScenarioSpec& s = cfg.scenario;
    // The preset decides the Lorenz parameters, so it goes first.
    if (const auto it = entries.find("kind"); it != entries.end()) {
        try {
            s = ScenarioSpec::preset(parse_scenario_kind(it->second));
        } catch (const InvalidArgument& e) {
            throw ConfigError("kind", e.what());
        }
    }
    for (const auto& [key, value] : entries) {
        if (key == "kind") continue;
        if (apply_reservoir_key(s.reservoir, s.ridge_reg, s.train_len, s.test_len, key, value)) continue;
        if (apply_lorenz_key(s, key, value)) continue;
        if (key == "alpha") s.alpha = to_double(key, value);
        else if (key == "component") {
            try {
                s.component = parse_component(value);
            } catch (const InvalidArgument& e) {
                throw ConfigError(key, e.what());
            }
        }
        else if (key == "input_units") s.input_units = units(key, value);
        else if (key == "seed") s.seed = to_unsigned(key, value);
        else if (key == "repeats") s.repeats = to_unsigned(key, value);
        else if (key == "seg_len") s.seg_len = to_unsigned(key, value);
        else if (key == "overlap") s.overlap = to_unsigned(key, value);
        else if (key == "transient_steps") s.transient_steps = to_unsigned(key, value);
        else if (key == "renormalize_mix") s.renormalize_mix = to_bool(key, value);
        else if (key == "exclude_filter_edges") s.exclude_filter_edges = to_bool(key, value);
        else if (key == "out") cfg.out_dir = value;
        else throw ConfigError(key, "unknown key '" + key + "'");
    }
    if (!entries.count("overlap") && entries.count("seg_len")) s.overlap = s.seg_len / 2;
}

void apply_estimator(EstimatorSettings& est, const Entries& entries) {
    AlphaEstimatorConfig& c = est.config;
    for (const auto& [key, value] : entries) {
        if (apply_reservoir_key(c.reservoir, c.ridge_reg, c.train_len, c.test_len, key, value)) continue;
        if (key == "grid") c.grid = parse_number_list(key, value);
        else if (key == "grid_step") {
            const double step = to_double(key, value);
            if (!(step > 0.0 && step <= 1.0)) throw ConfigError(key, "'grid_step' must lie in (0, 1]");
            const auto n = static_cast<int>(std::lround(1.0 / step));
            if (std::abs(n * step - 1.0) > 1e-9) throw ConfigError(key, "'grid_step' must divide 1");
            c.grid.clear();
            for (int i = 0; i <= n; ++i) c.grid.push_back(static_cast<double>(i) / n);
        }
        else if (key == "test_stream") est.test_stream = to_unsigned(key, value);
        else if (key == "input_units") c.input_units = units(key, value);
        else throw ConfigError(key, "unknown key '" + key + "' in [estimator]");
    }
    if (entries.count("grid") && entries.count("grid_step")) {
        throw ConfigError("grid", "'grid' and 'grid_step' are mutually exclusive");
    }
}

void apply_sweep(SweepSettings& sw, const Entries& entries) {
    for (const auto& [key, value] : entries) {
        if (key == "alphas") sw.alphas = parse_number_list(key, value);
        else throw ConfigError(key, "unknown key '" + key + "' in [sweep]");
    }
}

void apply_interp(InterpSettings& in, const Entries& entries) {
    for (const auto& [key, value] : entries) {
        if (key == "center") in.center = to_double(key, value);
        else if (key == "spacings") in.spacings = parse_number_list(key, value);
        else if (key == "bank") in.bank = parse_number_list(key, value);
        else if (key == "queries") in.queries = parse_number_list(key, value);
        else throw ConfigError(key, "unknown key '" + key + "' in [interp]");
    }
}

void apply_generate(GenerateSettings& g, const Entries& entries) {
    for (const auto& [key, value] : entries) {
        if (key == "n_samples") {
            g.n_samples = to_unsigned(key, value);
            if (*g.n_samples == 0) throw ConfigError(key, "'n_samples' must be positive");
        }
        else throw ConfigError(key, "unknown key '" + key + "' in [generate]");
    }
}

} // namespace

std::vector<double> parse_number_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.empty()) throw ConfigError(key, "'" + key + "': empty list");
    return out;
}

RunConfig parse_config(const std::string& text) {
    std::map<std::string, Entries> sections;
    sections["scenario"];
    std::string section = "scenario";
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line, "line " + std::to_string(line_no) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "scenario" && section != "sweep" && section != "estimator" && section != "interp" &&
                section != "generate") {
                throw ConfigError(section, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(line, "line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(key, "line " + std::to_string(line_no) + ": empty key");
        if (!sections[section].emplace(key, value).second) {
            throw ConfigError(key, "duplicate key '" + key + "' in [" + section + "]");
        }
    }

    RunConfig cfg;
    apply_scenario(cfg, sections["scenario"]);
    apply_sweep(cfg.sweep, sections["sweep"]);
    apply_estimator(cfg.estimator, sections["estimator"]);
    apply_interp(cfg.interp, sections["interp"]);
    apply_generate(cfg.generate, sections["generate"]);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

} // namespace rcsep
