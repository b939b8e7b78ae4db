#include "tokenfin/verification.hpp"

#include "tokenfin/closed_form.hpp"
#include "tokenfin/oracle.hpp"
#include "tokenfin/sweep.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace tokenfin {

namespace {

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

CheckResult token_dominance_random(const VerifyOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int accepted = 0, attempts = 0, violations = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    while (accepted < opt.random_draws && attempts < 100 * opt.random_draws) {
        ++attempts;
        ModelParams p;
        p.gross_rate = 1.0 + 0.2 * unit(rng);
        p.early_prob = unit(rng);
        p.liquid_share_t1 = 1.0 - unit(rng); // (0, 1]
        p.liquid_share_t2 = unit(rng);
        p.output_t1 = 20.0 * unit(rng);
        p.output_t2 = 20.0 * unit(rng);
        p.fixed_cost = 5.0 * unit(rng);
        p.investment = 0.5 + 9.5 * unit(rng);
        p.wealth = p.investment + 0.1 + 10.0 * unit(rng);
        if (p.early_prob <= 0.0 || p.liquid_share_t1 <= 0.0) continue;
        double equity = 0, token = 0;
        try {
            equity = solve_equity_rn(validate_params(p)).payoff;
            token = solve_token_rn(p).payoff;
        } catch (const ModelError&) {
            continue;
        }
        ++accepted;
        min_gap = std::min(min_gap, token - equity);
        if (!(token > equity)) ++violations;
    }
    return {"token payoff > equity payoff (random draws)",
            violations == 0 && accepted == opt.random_draws,
            fmt::format("{} draws, {} violations, min gap {:.3g}", accepted, violations, min_gap)};
}

CheckResult limit_identities(const ModelParams& base) {
    double worst = 0.0;
    for (double lam : {0.0, base.early_prob, 0.3, 0.6}) {
        ModelParams p = base;
        p.early_prob = lam;
        p.liquid_share_t1 = 0.0;
        p.liquid_share_t2 = 1.0;
        try {
            const EquitySolution e = solve_equity_rn(p);
            const TokenSolution t = solve_token_rn(p);
            worst = std::max({worst, std::abs(t.required_return - e.required_return),
                              std::abs(t.payoff - e.payoff)});
        } catch (const ModelError&) {
            // equity unfinanceable at this lambda; nothing to compare
        }
        p.liquid_share_t1 = 1.0;
        const TokenSolution t = solve_token_rn(p);
        worst = std::max({worst, std::abs(t.payoff - bond_benchmark(p)),
                          std::abs(t.required_return - p.gross_rate)});
    }
    return {"equity limit (phi1=0, phi2=1) and bond limit (phi1=1)", worst <= 1e-12,
            fmt::format("max abs deviation {:.3g}", worst)};
}

CheckResult slope_grid(const ModelParams& base) {
    int sign_violations = 0;
    double worst_rel = 0.0;
    for (int i = 1; i <= 20; ++i) {
        for (int j = 1; j <= 20; ++j) {
            ModelParams p = base;
            p.liquid_share_t1 = i / 21.0;
            p.liquid_share_t2 = j / 21.0;
            const FdReport r = fd_derivative_check(p, 1e-6);
            if (r.analytic_phi1 < 0.0 || r.analytic_phi2 > 0.0) ++sign_violations;
            if (base.early_prob > 0.0)
                worst_rel = std::max({worst_rel, r.rel_gap_phi1, r.rel_gap_phi2});
            else
                worst_rel = std::max({worst_rel, r.abs_gap_phi1, r.abs_gap_phi2});
        }
    }
    return {"payoff slopes: signs and finite differences (20x20)",
            sign_violations == 0 && worst_rel <= 1e-6,
            fmt::format("{} sign violations, worst gap {:.3g}", sign_violations, worst_rel)};
}

CheckResult crra_continuity(const ModelParams& base, const FixedPointConfig& cfg) {
    ModelParams p = base;
    p.risk_aversion = 1e-8;
    double worst = 0.0;
    std::string note;
    try {
        const EquitySolution en = solve_equity_rn(p);
        const CrraEquitySolution ea = solve_equity_crra(p, cfg);
        worst = std::max({worst, rel_diff(ea.price, en.price), rel_diff(ea.payoff, en.payoff)});
    } catch (const ModelError& e) {
        note = std::string(" (equity: ") + e.what() + ")";
    }
    const TokenSolution tn = solve_token_rn(p);
    const CrraTokenSolution ta = solve_token_crra(p, cfg);
    worst = std::max({worst, rel_diff(ta.price, tn.price), rel_diff(ta.payoff, tn.payoff)});
    return {"CRRA at sigma=1e-8 matches risk-neutral", worst <= 1e-6,
            fmt::format("max rel deviation {:.3g}{}", worst, note)};
}

CheckResult risk_neutral_indifference(const ModelParams& base) {
    ModelParams p = base;
    p.risk_aversion = 0.0;
    double worst_spread = 0.0, worst_slope = 0.0;
    auto probe = [&](Asset asset, double price) {
        const double ref = expected_utility(p, asset, price, 0.0);
        for (int k = 1; k <= 20; ++k) {
            const double spend = p.wealth * k / 21.0;
            worst_spread = std::max(worst_spread,
                                    std::abs(expected_utility(p, asset, price, spend) - ref));
        }
        worst_slope = std::max(worst_slope, std::abs(indifference_slope(p, asset, price)));
    };
    try {
        probe(Asset::Equity, solve_equity_rn(p).price);
    } catch (const ModelError&) {
    }
    probe(Asset::Token, solve_token_rn(p).price);
    return {"risk-neutral indifference at closed-form prices",
            worst_spread <= 1e-9 && worst_slope <= 1e-8,
            fmt::format("utility spread {:.3g}, slope {:.3g}", worst_spread, worst_slope)};
}

// Solver and oracle agree when both find a price within 1e-3 relative, or
// both find none; every solved point must also satisfy its FOCs.
struct AgreementTally {
    int compared = 0, both_none = 0, failures = 0;
    double worst_rel = 0.0, worst_foc = 0.0;
    std::string first_failure;
};

void compare_with_oracle(const ModelParams& p, Asset asset, const VerifyOptions& opt,
                         AgreementTally& tally) {
    double solver_price = 0.0;
    bool solver_ok = true;
    std::string solver_error;
    try {
        if (asset == Asset::Equity) {
            const CrraEquitySolution s = solve_equity_crra(p, opt.solver);
            solver_price = s.price;
            tally.worst_foc = std::max(tally.worst_foc, foc_residual(p, s).max_abs());
        } else {
            const CrraTokenSolution s = solve_token_crra(p, opt.solver);
            solver_price = s.price;
            tally.worst_foc = std::max(tally.worst_foc, foc_residual(p, s).max_abs());
        }
    } catch (const ModelError& e) {
        solver_ok = false;
        solver_error = e.what();
    }

    double oracle_price = 0.0;
    bool oracle_ok = true;
    try {
        oracle_price = find_clearing_price(p, asset, 64, opt.oracle_grid_points);
    } catch (const ModelError&) {
        oracle_ok = false;
    }

    const std::string where = fmt::format("{} lambda={} phi1={} phi2={} sigma={}", to_string(asset),
                                          p.early_prob, p.liquid_share_t1, p.liquid_share_t2,
                                          p.risk_aversion);
    if (solver_ok && oracle_ok) {
        ++tally.compared;
        const double rel = rel_diff(solver_price, oracle_price);
        tally.worst_rel = std::max(tally.worst_rel, rel);
        if (rel > 1e-3) {
            ++tally.failures;
            if (tally.first_failure.empty())
                tally.first_failure = fmt::format("{}: solver {} vs oracle {}", where,
                                                  solver_price, oracle_price);
        }
    } else if (!solver_ok && !oracle_ok) {
        ++tally.both_none;
    } else {
        ++tally.failures;
        if (tally.first_failure.empty())
            tally.first_failure =
                fmt::format("{}: {}", where,
                            solver_ok ? "oracle found no clearing price" : solver_error);
    }
}

std::vector<CheckResult> oracle_agreement(const ModelParams& base, const VerifyOptions& opt) {
    std::vector<ModelParams> points{base};
    for (auto [lam, phi1, phi2] : {std::tuple{0.05, 0.25, 1.0}, std::tuple{0.3, 0.75, 0.5}}) {
        ModelParams p = base;
        p.early_prob = lam;
        p.liquid_share_t1 = phi1;
        p.liquid_share_t2 = phi2;
        points.push_back(p);
    }
    AgreementTally tally;
    for (const ModelParams& point : points) {
        for (double sigma : {0.5, 1.0, 2.0, 4.0}) {
            ModelParams p = point;
            p.risk_aversion = sigma;
            compare_with_oracle(p, Asset::Equity, opt, tally);
            compare_with_oracle(p, Asset::Token, opt, tally);
        }
    }
    std::string detail = fmt::format("{} priced pairs (worst rel {:.3g}), {} agreed no-equilibrium",
                                     tally.compared, tally.worst_rel, tally.both_none);
    if (!tally.first_failure.empty()) detail += "; " + tally.first_failure;
    return {
        {"CRRA solver price vs oracle clearing price", tally.failures == 0, detail},
        {"FOC residuals of CRRA solutions", tally.worst_foc <= 1e-8,
         fmt::format("max |residual| {:.3g}", tally.worst_foc)},
    };
}

// Per-leg summary of a sigma sweep. A leg that stops solving is treated as
// having lost that form of financing; it must not solve again further out.
struct LegTrace {
    bool monotone = true;
    bool stays_lost = true;
    int solved = 0;
    bool solved_at_zero = false;
    bool lost = false;
    double first = 0, last = 0;

    void add(bool ok, double payoff) {
        if (!ok) {
            lost = true;
            return;
        }
        if (lost) stays_lost = false;
        if (solved == 0) first = payoff;
        else if (payoff > last) monotone = false;
        last = payoff;
        ++solved;
    }
    // Decline from sigma = 0; once financing is lost the payoff floor of 0
    // ((1 - e) Pi with e at its limit) is the end point.
    double decline() const { return first - (lost ? 0.0 : last); }
};

std::vector<CheckResult> payoff_vs_sigma(const ModelParams& base, const FixedPointConfig& cfg) {
    const std::vector<SweepRow> rows = figure1_data(base, figure1_grid(), cfg);
    ModelParams rn = base;
    rn.early_prob = 0.1;
    rn.risk_aversion = 0.0;

    LegTrace equity, token;
    bool ordered = true, dominance = true;
    for (const SweepRow& r : rows) {
        equity.add(r.equity_ok(), r.equity_payoff);
        token.add(r.token_ok(), r.token_payoff);
        if (r.equity_ok()) {
            const double slack = 1e-9 * (1.0 + std::abs(r.equity_payoff));
            if (!r.token_ok() || r.token_payoff < r.equity_payoff - slack) ordered = false;
        }
        try {
            if (r.equity_ok() && r.equity_price > solve_equity_rn(rn).price * (1.0 + 1e-12))
                dominance = false;
        } catch (const ModelError&) {
        }
        if (r.token_ok() && r.token_price > solve_token_rn(rn).price * (1.0 + 1e-12))
            dominance = false;
    }
    equity.solved_at_zero = rows.front().equity_ok();
    token.solved_at_zero = rows.front().token_ok();

    std::vector<CheckResult> out;
    out.push_back({"payoffs nonincreasing in sigma",
                   equity.monotone && token.monotone && equity.stays_lost && token.stays_lost,
                   fmt::format("equity solved on {} of {} grid points, token on {}", equity.solved,
                               rows.size(), token.solved)});
    out.push_back({"token payoff >= equity payoff at every sigma", ordered, ""});

    CheckResult steeper{"equity declines more than token over sigma", false, ""};
    if (!equity.solved_at_zero || !token.solved_at_zero) {
        steeper.passed = true;
        steeper.skipped = true;
        steeper.detail = "a leg does not finance at sigma=0";
    } else if (base.liquid_share_t1 == 0.0) {
        steeper.passed = true;
        steeper.skipped = true;
        steeper.detail = "phi1 = 0: the token replicates equity";
    } else {
        steeper.passed = equity.decline() > token.decline();
        steeper.detail = fmt::format("equity decline {:.6f}{}, token decline {:.6f}{}",
                                     equity.decline(), equity.lost ? " (financing lost)" : "",
                                     token.decline(), token.lost ? " (financing lost)" : "");
    }
    out.push_back(steeper);
    out.push_back({"CRRA prices <= risk-neutral prices", dominance, ""});

    if (base == ModelParams{}) {
        const SweepRow& at2 = rows[8];
        const bool ok = at2.equity_ok() && at2.token_ok() &&
                        std::abs(at2.equity_payoff - 2.5942) <= 1e-3 &&
                        std::abs(at2.token_payoff - 10.3541) <= 1e-3;
        out.push_back({"spot payoffs at sigma=2", ok,
                       fmt::format("equity {:.6f}, token {:.6f}", at2.equity_payoff,
                                   at2.token_payoff)});
    }
    return out;
}

} // namespace

std::vector<CheckResult> run_verification(const ModelParams& base, const VerifyOptions& options) {
    validate_params(base);
    std::vector<CheckResult> out;
    out.push_back(token_dominance_random(options));
    out.push_back(limit_identities(base));
    out.push_back(slope_grid(base));
    out.push_back(crra_continuity(base, options.solver));
    out.push_back(risk_neutral_indifference(base));
    for (CheckResult& r : oracle_agreement(base, options)) out.push_back(std::move(r));
    for (CheckResult& r : payoff_vs_sigma(base, options.solver)) out.push_back(std::move(r));
    return out;
}

} // namespace tokenfin
