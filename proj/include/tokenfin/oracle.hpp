#pragma once

#include "tokenfin/closed_form.hpp"
#include "tokenfin/crra.hpp"
#include "tokenfin/model.hpp"

#include <optional>
#include <string_view>

namespace tokenfin {

// Brute-force checks of the equilibrium solvers. Everything here is written
// from the investor's objective and first-order conditions directly; none of
// the solver's pricing formulas are reused.

enum class Asset { Equity, Token };

constexpr std::string_view to_string(Asset a) { return a == Asset::Equity ? "equity" : "token"; }

/// Signed residuals of the investor first-order conditions with the budget
/// multiplier eliminated. `asset` > 0 means the asset is priced above the
/// investor's marginal valuation.
struct FocResiduals {
    double bond = 0;   // bond marginal utility minus multiplier implied by the asset FOC
    double asset = 0;  // price minus asset marginal utility / bond marginal utility
    double budget = 0; // I - price * quantity

    double max_abs() const;
};

struct FdReport {
    double analytic_phi1 = 0, numeric_phi1 = 0;
    double analytic_phi2 = 0, numeric_phi2 = 0;
    double abs_gap_phi1 = 0, rel_gap_phi1 = 0;
    double abs_gap_phi2 = 0, rel_gap_phi2 = 0;
    bool one_sided_phi1 = false, one_sided_phi2 = false;
};

struct OracleReport {
    Asset asset = Asset::Equity;
    double price_tested = 0;
    double optimal_risky_spend = 0; // NaN under risk neutrality (demand is set-valued)
    double clearing_gap = 0;        // optimal_risky_spend - I
    double indifference_slope = 0;  // only meaningful for sigma = 0, NaN otherwise
    FocResiduals foc_residuals;
    std::optional<FdReport> fd_report; // token, sigma = 0, interior phi only
};

inline constexpr int kDefaultGridPoints = 10001;

/// Investor's expected discounted utility when `risky_spend` of W goes to
/// the asset at `price` and the rest to bonds. Throws Domain on nonpositive
/// consumption.
double expected_utility(const ModelParams& p, Asset asset, double price, double risky_spend);

/// Utility-maximizing risky spend on [0, W - 1e-9 W]: uniform grid, then
/// golden-section refinement of the best cell. Ties go to the lower spend.
double grid_demand(const ModelParams& p, Asset asset, double price,
                   int grid_points = kDefaultGridPoints);

/// Price at which grid_demand equals I, by bisection on [lo, hi]. Requires
/// sigma > 0 and demand(lo) > I > demand(hi); throws Bracket otherwise.
double clearing_price(const ModelParams& p, Asset asset, double lo, double hi,
                      int grid_points = kDefaultGridPoints);

/// Default clearing-price bracket: [I, Pi/R^2] for equity (share sold at
/// most one), [1e-6, 1/R] for tokens (never worth more than a bond).
std::pair<double, double> default_price_bracket(const ModelParams& p, Asset asset);

/// Clearing price over the default bracket. Demand measured in spend need
/// not be monotone far below equilibrium (cheap assets let a risk-averse
/// investor reach its consumption targets with less spend), so prices are
/// scanned downward from the upper bound on a log grid and the first
/// interval where excess demand turns positive is bisected. Throws Bracket
/// when demand never reaches I: no admissible equilibrium.
double find_clearing_price(const ModelParams& p, Asset asset, int scan_points = 64,
                           int grid_points = kDefaultGridPoints);

FocResiduals foc_residual(const ModelParams& p, Asset asset, double price, double quantity);
FocResiduals foc_residual(const ModelParams& p, const EquitySolution& s);
FocResiduals foc_residual(const ModelParams& p, const TokenSolution& s);
FocResiduals foc_residual(const ModelParams& p, const CrraEquitySolution& s);
FocResiduals foc_residual(const ModelParams& p, const CrraTokenSolution& s);

/// Finite differences of the risk-neutral token payoff in phi1 and phi2
/// against payoff_derivatives_rn. Central where the stencil fits in [0, 1],
/// second-order one-sided otherwise.
FdReport fd_derivative_check(const ModelParams& p, double step = 1e-6);

/// Derivative of expected utility in risky spend at I (central difference).
double indifference_slope(const ModelParams& p, Asset asset, double price);

/// Runs every applicable oracle check against one tested price.
OracleReport audit(const ModelParams& p, Asset asset, double price,
                   int grid_points = kDefaultGridPoints);

} // namespace tokenfin
