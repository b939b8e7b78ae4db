#pragma once

#include "tokenfin/model.hpp"

namespace tokenfin {

/// Risk-neutral equity equilibrium.
struct EquitySolution {
    double price = 0;             // q
    double share_sold = 0;        // e = I / q
    double required_return = 0;   // Pi / q
    double payoff = 0;            // entrepreneur consumption at t=2
    double consumption_early = 0; // type-a investor, B0 R
    double consumption_late = 0;  // type-b investor, B0 R^2 + e Pi
    bool negative_profit = false;
};

/// Risk-neutral token equilibrium.
struct TokenSolution {
    double price = 0;             // p0
    double tokens_sold = 0;       // T0 = I / p0
    double required_return = 0;   // 1 / p0
    double payoff = 0;            // entrepreneur consumption at t=2
    double issuance_t1 = 0;       // y1 - phi1 T0
    double issuance_t2 = 0;       // y2 - phi2 (1 - phi1) T0
    double consumption_early = 0; // B0 R + phi1 T0
    double consumption_late = 0;  // (B0 R + phi1 T0) R + phi2 (1 - phi1) T0
    bool negative_issuance = false;
    bool negative_profit = false;
};

struct PayoffSlopes {
    double d_phi1 = 0;
    double d_phi2 = 0;
};

/// Number of t=2 numeraire units the entrepreneur gives up per token sold at
/// t=0: tokens resold at t=1 are worth R by t=2, tokens resold at t=2 are
/// worth 1. phi2 (1 - phi1) + phi1 R.
double resale_weight(const ModelParams& p);

/// Token t=0 price under risk neutrality (zero when the token is illiquid).
double token_price_rn(const ModelParams& p);

EquitySolution solve_equity_rn(const ModelParams& p);
TokenSolution solve_token_rn(const ModelParams& p);

/// Analytic d(payoff)/d(phi1) and d(payoff)/d(phi2) of the token payoff.
PayoffSlopes payoff_derivatives_rn(const ModelParams& p);

/// Payoff when the venture is financed at the risk-free rate: Pi - I R^2.
double bond_benchmark(const ModelParams& p);

} // namespace tokenfin
