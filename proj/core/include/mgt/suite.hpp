#pragma once

#include <string>
#include <vector>

#include "mgt/config.hpp"
#include "mgt/report.hpp"

namespace mgt {

// Check identifiers in report order, one row per acceptance criterion.
const std::vector<std::string>& suite_check_ids();

// Runs the acceptance suite. Checks execute in id order and are isolated: a
// module error inside one marks that row failed and the rest still run. With
// tau_k = 0 the certified sets are empty by definition, so the chart-based
// checks report skipped with that reason.
//
// The checks pin their own calibrated grids, strides and radius ladders; the
// config contributes the seed, the tolerances, and tau_k. The per-map ladder
// and stride keys drive the single-map command verbs instead.
VerifyReport run_suite(const ExperimentConfig& cfg);

}  // namespace mgt
