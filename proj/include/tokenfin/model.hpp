#pragma once

#include "tokenfin/errors.hpp"

namespace tokenfin {

/// Exogenous scalars of the three-period financing model.
///
/// Defaults are the reference point used throughout the CLI and tests.
/// The discount factor is always 1/gross_rate and post-launch token prices
/// are fixed at 1, so neither is stored here.
struct ModelParams {
    double gross_rate = 1.05;      ///< R, gross risk-free rate per period (>= 1)
    double early_prob = 0.1;       ///< lambda, probability an investor must consume at t=1
    double liquid_share_t1 = 0.5;  ///< phi1, share of the t=0 token holding sellable at t=1
    double liquid_share_t2 = 1.0;  ///< phi2, share of the remaining tokens sellable at t=2
    double output_t1 = 10.0;       ///< y1, digital-good output at t=1
    double output_t2 = 10.0;       ///< y2, digital-good output at t=2
    double fixed_cost = 2.0;       ///< omega, per-period production cost
    double investment = 5.0;       ///< I, required initial investment (> 0)
    double wealth = 10.0;          ///< W, investor initial wealth (> I)
    double risk_aversion = 0.0;    ///< sigma, CRRA curvature; 0 is risk neutral

    bool operator==(const ModelParams&) const = default;
};

/// Post-launch token price at t=1 and t=2.
inline constexpr double kTokenRedemptionPrice = 1.0;

struct DerivedQuantities {
    double future_profit; ///< t=2 value of operating profit
    double discount;      ///< 1 / gross_rate
};

/// Returns `raw` unchanged when every bound holds; throws ModelError(Domain)
/// naming the first violated bound otherwise.
ModelParams validate_params(const ModelParams& raw);

/// (y1 - omega) R + y2 - omega. May be negative.
double future_profit(const ModelParams& p);

inline double discount_factor(const ModelParams& p) { return 1.0 / p.gross_rate; }

inline DerivedQuantities derive(const ModelParams& p) {
    return {future_profit(p), discount_factor(p)};
}

/// Bond holding implied by either budget identity (e q = I or p0 T0 = I).
inline double bond_holding(const ModelParams& p) { return p.wealth - p.investment; }

} // namespace tokenfin
