#include "tokenfin/sweep.hpp"

#include "tokenfin/closed_form.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <utility>

namespace tokenfin {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr std::array<std::pair<SweepParam, std::string_view>, 10> kNames{{
    {SweepParam::Lambda, "lambda"},
    {SweepParam::Phi1, "phi1"},
    {SweepParam::Phi2, "phi2"},
    {SweepParam::Sigma, "sigma"},
    {SweepParam::R, "R"},
    {SweepParam::I, "I"},
    {SweepParam::W, "W"},
    {SweepParam::Y1, "y1"},
    {SweepParam::Y2, "y2"},
    {SweepParam::Omega, "omega"},
}};

std::string leg_flag(std::string_view leg, const ModelError& e) {
    return std::string(leg) + ":" + std::string(to_string(e.kind()));
}

struct Leg {
    double price = kNaN, ret = kNaN, payoff = kNaN;
};

Leg solve_equity_leg(const ModelParams& p, const FixedPointConfig& cfg,
                     std::vector<std::string>& flags) {
    try {
        if (p.risk_aversion == 0.0) {
            const EquitySolution s = solve_equity_rn(p);
            return {s.price, s.required_return, s.payoff};
        }
        const CrraEquitySolution s = solve_equity_crra(p, cfg);
        if (s.diagnostics.multiple_roots) flags.emplace_back("equity:multiple_roots");
        return {s.price, s.required_return, s.payoff};
    } catch (const ModelError& e) {
        flags.push_back(leg_flag("equity", e));
        return {};
    }
}

Leg solve_token_leg(const ModelParams& p, const FixedPointConfig& cfg,
                    std::vector<std::string>& flags) {
    try {
        if (p.risk_aversion == 0.0) {
            const TokenSolution s = solve_token_rn(p);
            if (s.negative_issuance) flags.emplace_back("token:negative_issuance");
            return {s.price, s.required_return, s.payoff};
        }
        const CrraTokenSolution s = solve_token_crra(p, cfg);
        if (s.diagnostics.multiple_roots) flags.emplace_back("token:multiple_roots");
        const double tokens = s.tokens_sold;
        const double phi1 = p.liquid_share_t1;
        if (p.output_t1 - phi1 * tokens < 0.0 ||
            p.output_t2 - p.liquid_share_t2 * (1.0 - phi1) * tokens < 0.0)
            flags.emplace_back("token:negative_issuance");
        return {s.price, s.required_return, s.payoff};
    } catch (const ModelError& e) {
        flags.push_back(leg_flag("token", e));
        return {};
    }
}

} // namespace

std::string_view param_name(SweepParam param) {
    for (const auto& [p, name] : kNames)
        if (p == param) return name;
    return "?";
}

std::optional<SweepParam> parse_param_name(std::string_view name) {
    for (const auto& [p, n] : kNames)
        if (n == name) return p;
    return std::nullopt;
}

double& param_ref(ModelParams& p, SweepParam param) {
    switch (param) {
    case SweepParam::Lambda: return p.early_prob;
    case SweepParam::Phi1: return p.liquid_share_t1;
    case SweepParam::Phi2: return p.liquid_share_t2;
    case SweepParam::Sigma: return p.risk_aversion;
    case SweepParam::R: return p.gross_rate;
    case SweepParam::I: return p.investment;
    case SweepParam::W: return p.wealth;
    case SweepParam::Y1: return p.output_t1;
    case SweepParam::Y2: return p.output_t2;
    case SweepParam::Omega: return p.fixed_cost;
    }
    return p.risk_aversion;
}

std::vector<double> GridSpec::values() const {
    if (!(lo < hi)) throw ModelError(ErrorKind::Domain, "grid needs lo < hi");
    if (steps < 2) throw ModelError(ErrorKind::Domain, "grid needs at least 2 steps");
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
        out[i] = i == steps - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
    return out;
}

bool SweepRow::equity_ok() const { return !std::isnan(equity_payoff); }
bool SweepRow::token_ok() const { return !std::isnan(token_payoff); }

std::vector<SweepRow> sweep_1d(const ModelParams& base, const GridSpec& grid,
                               const FixedPointConfig& cfg) {
    validate_params(base);
    const std::vector<double> values = grid.values();

    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (double v : values) {
        SweepRow row;
        row.grid_value = v;
        ModelParams p = base;
        param_ref(p, grid.param) = v;
        try {
            validate_params(p);
        } catch (const ModelError& e) {
            row.equity_price = row.token_price = row.equity_return = row.token_return = kNaN;
            row.equity_payoff = row.token_payoff = row.payoff_diff = kNaN;
            row.flags.push_back(leg_flag("params", e));
            rows.push_back(std::move(row));
            continue;
        }
        if (future_profit(p) < 0.0) row.flags.emplace_back("negative_profit");

        const Leg eq = solve_equity_leg(p, cfg, row.flags);
        const Leg tk = solve_token_leg(p, cfg, row.flags);
        row.equity_price = eq.price;
        row.equity_return = eq.ret;
        row.equity_payoff = eq.payoff;
        row.token_price = tk.price;
        row.token_return = tk.ret;
        row.token_payoff = tk.payoff;
        row.payoff_diff = tk.payoff - eq.payoff;
        rows.push_back(std::move(row));
    }
    return rows;
}

GridSpec figure1_grid() { return {SweepParam::Sigma, 0.0, 5.0, 21}; }

std::vector<SweepRow> figure1_data(const ModelParams& base, const GridSpec& sigma_grid,
                                   const FixedPointConfig& cfg) {
    if (sigma_grid.param != SweepParam::Sigma)
        throw ModelError(ErrorKind::Domain, "figure grid must sweep sigma");
    ModelParams p = base;
    p.early_prob = 0.1;
    return sweep_1d(p, sigma_grid, cfg);
}

std::vector<Crossing> find_crossing(const std::vector<SweepRow>& rows, SweepColumn column,
                                    double level) {
    auto pick = [column](const SweepRow& r) {
        switch (column) {
        case SweepColumn::PayoffDiff: return r.payoff_diff;
        case SweepColumn::EquityPayoff: return r.equity_payoff;
        case SweepColumn::TokenPayoff: return r.token_payoff;
        }
        return kNaN;
    };

    std::vector<Crossing> out;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const double a = pick(rows[i]) - level;
        const double b = pick(rows[i + 1]) - level;
        if (std::isnan(a) || std::isnan(b)) continue;
        if ((a >= 0.0) == (b >= 0.0)) continue;
        const double x0 = rows[i].grid_value, x1 = rows[i + 1].grid_value;
        out.push_back({x0, x1, x0 + (x1 - x0) * a / (a - b)});
    }
    return out;
}

} // namespace tokenfin
