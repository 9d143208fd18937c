#pragma once

// Subcommands behind the `rcsep` executable. Each writes CSV files into
// cfg.out_dir and throws on failure; run_cli maps exceptions to exit codes.
//
// Exit codes: 0 success, 1 invalid input or numerical failure,
// 2 filesystem error, 3 configuration or usage error.

#include "rcsep/config.hpp"

#include <ostream>

namespace rcsep {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitConfig = 3;

/// s1.csv, s2.csv, mixed.csv (`t,value`), trajectory1.csv and
/// trajectory2.csv (`t,x,y,z`, unnormalized) and manifest.csv.
void cmd_generate(const RunConfig& cfg, int jobs);

/// predictions.csv (`t,actual,rc,wiener`, first seed), report.csv (one row
/// per seed and estimator), summary.csv and filter.csv (first seed).
void cmd_separate(const RunConfig& cfg, int jobs);

/// fig2.csv / fig3.csv / fig4.csv / sweep.csv by scenario kind, plus
/// *_runs.csv with every (alpha, seed) report. The matched-spectra scenario
/// also writes fig4a_psd.csv and fig4a_overlap.csv.
void cmd_sweep(const RunConfig& cfg, int jobs);

/// fig5.csv (`true_alpha,corrected_estimate` on held-out data),
/// fig5_raw.csv (train and test, raw and corrected) and fig5_poly.csv.
void cmd_estimate_alpha(const RunConfig& cfg, int jobs, std::ostream& log);

/// fig6a.csv (spacing study around the center) and fig6b.csv (bank queries).
void cmd_interp_study(const RunConfig& cfg, int jobs);

/// Parses arguments, runs one subcommand and returns its exit code.
/// Errors produce one line on `err`: `rcsep: error[<kind>]: <message>`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace rcsep
