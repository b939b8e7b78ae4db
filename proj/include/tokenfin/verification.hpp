#pragma once

#include "tokenfin/crra.hpp"
#include "tokenfin/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tokenfin {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    bool skipped = false; // not applicable at this point; counts as passed
};

struct VerifyOptions {
    std::uint64_t seed = 20240601;
    int random_draws = 1000;
    int oracle_grid_points = 10001;
    FixedPointConfig solver;
};

/// Property and oracle checks around `base`: token dominance over random
/// draws, the equity/bond limits, payoff slopes vs finite differences,
/// CRRA continuity and oracle agreement, FOC residuals, price dominance,
/// and the payoff-vs-sigma ordering. Spot values are checked only at the
/// default parameter point.
std::vector<CheckResult> run_verification(const ModelParams& base,
                                          const VerifyOptions& options = {});

} // namespace tokenfin
