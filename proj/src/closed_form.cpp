#include "tokenfin/closed_form.hpp"

#include <cassert>
#include <cmath>

namespace tokenfin {

double resale_weight(const ModelParams& p) {
    const double phi1 = p.liquid_share_t1;
    return p.liquid_share_t2 * (1.0 - phi1) + phi1 * p.gross_rate;
}

double token_price_rn(const ModelParams& p) {
    const double R = p.gross_rate;
    const double phi1 = p.liquid_share_t1;
    return phi1 / R + (1.0 - p.early_prob) * p.liquid_share_t2 * (1.0 - phi1) / (R * R);
}

EquitySolution solve_equity_rn(const ModelParams& p) {
    if (p.early_prob >= 1.0)
        throw ModelError(ErrorKind::Degenerate, "equity price is zero when lambda = 1");

    const double R = p.gross_rate;
    const double pi = future_profit(p);
    const double price = (1.0 - p.early_prob) * pi / (R * R);
    if (price <= 0.0)
        throw ModelError(ErrorKind::CannotFinance, "equity price is not positive");
    if (p.investment > price)
        throw ModelError(ErrorKind::CannotFinance, "the whole share is worth less than I");

    EquitySolution s;
    s.price = price;
    s.share_sold = p.investment / price;
    s.required_return = R * R / (1.0 - p.early_prob);
    s.payoff = pi - p.investment * s.required_return;
    const double bonds = bond_holding(p);
    s.consumption_early = bonds * R;
    s.consumption_late = bonds * R * R + s.share_sold * pi;
    s.negative_profit = pi < 0.0;
    return s;
}

TokenSolution solve_token_rn(const ModelParams& p) {
    const double price = token_price_rn(p);
    if (!(price > 0.0))
        throw ModelError(ErrorKind::IlliquidToken, "token price is zero; it cannot raise I");

    const double R = p.gross_rate;
    const double phi1 = p.liquid_share_t1;
    const double phi2 = p.liquid_share_t2;
    const double pi = future_profit(p);

    TokenSolution s;
    s.price = price;
    s.tokens_sold = p.investment / price;
    s.required_return = 1.0 / price;
    s.payoff = pi - resale_weight(p) * s.tokens_sold;
    s.issuance_t1 = p.output_t1 - phi1 * s.tokens_sold;
    s.issuance_t2 = p.output_t2 - phi2 * (1.0 - phi1) * s.tokens_sold;
    const double bonds = bond_holding(p);
    s.consumption_early = bonds * R + phi1 * s.tokens_sold;
    s.consumption_late = s.consumption_early * R + phi2 * (1.0 - phi1) * s.tokens_sold;
    s.negative_issuance = s.issuance_t1 < 0.0 || s.issuance_t2 < 0.0;
    s.negative_profit = pi < 0.0;

    // Issuance-based form of the same payoff: T2' p2 + (T1' p1 - omega) R - omega.
    [[maybe_unused]] const double via_issuance =
        s.issuance_t2 * kTokenRedemptionPrice +
        (s.issuance_t1 * kTokenRedemptionPrice - p.fixed_cost) * R - p.fixed_cost;
    assert(std::abs(via_issuance - s.payoff) <= 1e-9 * (1.0 + std::abs(s.payoff) + s.tokens_sold));
    return s;
}

PayoffSlopes payoff_derivatives_rn(const ModelParams& p) {
    const double R = p.gross_rate;
    const double lam = p.early_prob;
    const double phi1 = p.liquid_share_t1;
    const double phi2 = p.liquid_share_t2;
    const double base = phi1 * (R - (1.0 - lam) * phi2) + (1.0 - lam) * phi2;
    const double denom = base * base;
    if (!(denom > 0.0))
        throw ModelError(ErrorKind::Degenerate, "payoff derivative denominator is zero");

    const double scale = p.investment * R * R / denom;
    return {scale * R * lam * phi2, -scale * (1.0 - phi1) * lam * phi1 * R};
}

double bond_benchmark(const ModelParams& p) {
    const double R = p.gross_rate;
    return future_profit(p) - p.investment * R * R;
}

} // namespace tokenfin
