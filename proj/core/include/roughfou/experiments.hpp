#pragma once

#include <string>

#include "roughfou/config.hpp"

namespace roughfou {

// build version (git describe when available at configure time)
const char* version();

// Deterministic experiment outputs: the JSON payload embeds the resolved
// config and version and contains no timestamps, so identical config and
// seed reproduce it byte for byte; csv carries the same observations one row
// per line when the command is tabular, and is empty otherwise.
struct ExperimentResult {
    std::string json;
    std::string csv;
};

// expansion coefficients and the first-order value approximation per eps
ExperimentResult run_coefficients(const ExperimentConfig& cfg);

// value comparison per (eps, history): V^eps, its gaps to the two explicit
// strategies with CRN difference errors, and the wealth-equation cross-checks
ExperimentResult run_table2(const ExperimentConfig& cfg);

// ergodic scaling report over the diagnostics eps grid plus the dbar
// Monte Carlo cross-check
ExperimentResult run_diagnostics(const ExperimentConfig& cfg);

// factor path sample for the first eps; dumps the set to dump_file when
// nonempty and reports moment summaries
ExperimentResult run_paths(const ExperimentConfig& cfg, const std::string& dump_file);

// wealth-equation oracle for the two explicit strategies on every eps,
// against the exponential-functional estimators on the same paths
ExperimentResult run_wealth(const ExperimentConfig& cfg);

}  // namespace roughfou
