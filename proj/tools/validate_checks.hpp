#pragma once

#include <string>
#include <vector>

#include "sirlab/config.hpp"

namespace sirlab {

struct CheckResult {
    std::string name;
    bool passed;
    bool warning;  // informational (e.g. envelope surrogate flagged)
    std::string detail;
};

/// Runs the module invariant suites against the configured instance:
/// geometry, kernel, density, partition, operator bounds, infectivity,
/// solver conservation/positivity/a-priori, and a small simulation.
std::vector<CheckResult> run_validation(const RunConfig& config);

}  // namespace sirlab
