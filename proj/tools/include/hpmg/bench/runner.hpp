#pragma once
// Manifest-driven experiment execution shared by the CLI and the acceptance
// checks. Rerunning a written manifest reproduces its CSV files bitwise.

#include "hpmg/bench/experiments.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hpmg::bench {

/// convergence, cycles, history, residual-vs-error, equivalence, model
const std::vector<std::string>& experiment_names();

/// Defaults for an experiment's p list, levels, problem and extras; fields
/// already set in `m` are kept.
void fill_defaults(RunManifest& m);

struct RunOutcome {
  std::vector<std::filesystem::path> csv_files;
  std::filesystem::path manifest_file;
  bool pass = true; ///< false only when an equivalence check fails
};

/// Runs `m` (after fill_defaults), writes <experiment>*.csv and
/// <experiment>.json into `dir` and a short summary to `log`.
RunOutcome run_experiment(RunManifest m, const std::filesystem::path& dir, std::ostream& log);

} // namespace hpmg::bench
