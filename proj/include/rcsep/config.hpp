#pragma once

// Run configuration: a flat `key = value` document with optional
// `[section]` headers and `#` comments.
//
//   kind = diff_params        # scenario preset
//   alpha = 0.5
//   n_nodes = 2000
//   [sweep]
//   alphas = 0.1, 0.5, 0.9
//   [estimator]
//   n_nodes = 1000
//
// Keys outside a section (or under [scenario]) describe the separation
// scenario. [sweep], [estimator], [interp] and [generate] hold
// subcommand-specific settings. Unknown sections and keys are rejected.

#include "rcsep/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rcsep {

struct SweepSettings {
    std::vector<double> alphas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
};

struct EstimatorSettings {
    AlphaEstimatorConfig config = AlphaEstimatorConfig::defaults();
    /// Selects the held-out trajectory streams; change it for a fresh test set.
    std::uint64_t test_stream = 1;
};

struct InterpSettings {
    double center = 0.5;
    std::vector<double> spacings{0.0, 0.05, 0.1, 0.2, 0.4};
    std::vector<double> bank{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<double> queries{0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95};
};

struct GenerateSettings {
    /// Defaults to washout + train_len + test_len.
    std::optional<std::size_t> n_samples;
};

struct RunConfig {
    ScenarioSpec scenario = ScenarioSpec::preset(ScenarioKind::diff_params);
    SweepSettings sweep;
    EstimatorSettings estimator;
    InterpSettings interp;
    GenerateSettings generate;
    std::filesystem::path out_dir = "out";
};

/// Parses a configuration document. Throws ConfigError naming the offending key.
RunConfig parse_config(const std::string& text);

/// Reads and parses a file. Throws IoError if it cannot be read.
RunConfig load_config(const std::filesystem::path& path);

/// Comma-separated list of numbers.
std::vector<double> parse_number_list(const std::string& key, const std::string& value);

} // namespace rcsep
