// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include "tokenfin/closed_form.hpp"
#include "tokenfin/crra.hpp"
#include "tokenfin/oracle.hpp"
#include "tokenfin/sweep.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <sys/wait.h>

using namespace tokenfin;

namespace {

struct Outcome {
    bool passed;
    std::string detail;
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

ModelParams with_sigma(double sigma) {
    ModelParams p;
    p.risk_aversion = sigma;
    return p;
}

// 1. Closed forms at the default point, after confirming the oracle accepts
// both prices as equilibria (risk-neutral indifference).
Outcome closed_form_reproduction() {
    const ModelParams p;
    const EquitySolution e = solve_equity_rn(p);
    const TokenSolution t = solve_token_rn(p);
    const double slope_e = indifference_slope(p, Asset::Equity, e.price);
    const double slope_t = indifference_slope(p, Asset::Token, t.price);
    const std::array<std::pair<double, double>, 6> pairs{{{e.price, 13.387755},
                                                          {e.required_return, 1.225},
                                                          {e.payoff, 10.2750},
                                                          {t.price, 0.884354},
                                                          {t.required_return, 1.130769},
                                                          {t.payoff, 10.60481}}};
    double worst = 0.0;
    for (auto [got, want] : pairs) worst = std::max(worst, std::abs(got - want));
    const bool ok = worst <= 1e-4 && std::abs(slope_e) <= 1e-8 && std::abs(slope_t) <= 1e-8;
    return {ok, fmt::format("max abs error {:.2e}, oracle slopes {:.1e}/{:.1e}", worst, slope_e,
                            slope_t)};
}

// 2. Token payoff strictly above equity payoff over 1000 random valid draws.
Outcome token_dominance() {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int draws = 0, violations = 0;
    while (draws < 1000) {
        ModelParams p;
        p.gross_rate = 1.0 + 0.25 * u(rng);
        p.early_prob = u(rng);
        p.liquid_share_t1 = 1.0 - u(rng);
        p.liquid_share_t2 = u(rng);
        p.output_t1 = 25.0 * u(rng);
        p.output_t2 = 25.0 * u(rng);
        p.fixed_cost = 4.0 * u(rng);
        p.investment = 0.1 + 8.0 * u(rng);
        p.wealth = p.investment * (1.0 + 3.0 * u(rng)) + 1e-3;
        p.risk_aversion = 0.0;
        if (p.early_prob <= 0.0) continue;
        try {
            validate_params(p);
            const double equity = solve_equity_rn(p).payoff;
            ++draws;
            if (!(solve_token_rn(p).payoff > equity)) ++violations;
        } catch (const ModelError&) {
        }
    }
    return {violations == 0, fmt::format("{} draws, {} violations", draws, violations)};
}

// 3. Equity and bond limits of the token, to 1e-12.
Outcome limit_identities() {
    double worst = 0.0;
    for (double lam : {0.0, 0.1, 0.25, 0.5}) {
        for (double R : {1.0, 1.05, 1.15}) {
            ModelParams p;
            p.early_prob = lam;
            p.gross_rate = R;
            p.liquid_share_t1 = 0.0;
            p.liquid_share_t2 = 1.0;
            const EquitySolution e = solve_equity_rn(p);
            const TokenSolution t = solve_token_rn(p);
            worst = std::max({worst, std::abs(t.payoff - e.payoff),
                              std::abs(t.required_return - e.required_return)});
            p.liquid_share_t1 = 1.0;
            const TokenSolution b = solve_token_rn(p);
            worst = std::max({worst, std::abs(b.payoff - bond_benchmark(p)),
                              std::abs(b.required_return - R)});
        }
    }
    return {worst <= 1e-12, fmt::format("max abs deviation {:.2e}", worst)};
}

// 4. Slope signs and analytic vs central differences on a 20x20 interior grid.
Outcome slope_check() {
    int sign_bad = 0;
    double worst = 0.0;
    for (int i = 1; i <= 20; ++i) {
        for (int j = 1; j <= 20; ++j) {
            ModelParams p;
            p.liquid_share_t1 = i / 21.0;
            p.liquid_share_t2 = j / 21.0;
            const PayoffSlopes d = payoff_derivatives_rn(p);
            if (d.d_phi1 < 0.0 || d.d_phi2 > 0.0) ++sign_bad;
            const double h = 1e-6;
            auto payoff = [&](double phi1, double phi2) {
                ModelParams q = p;
                q.liquid_share_t1 = phi1;
                q.liquid_share_t2 = phi2;
                return solve_token_rn(q).payoff;
            };
            const double fd1 = (payoff(p.liquid_share_t1 + h, p.liquid_share_t2) -
                                payoff(p.liquid_share_t1 - h, p.liquid_share_t2)) / (2 * h);
            const double fd2 = (payoff(p.liquid_share_t1, p.liquid_share_t2 + h) -
                                payoff(p.liquid_share_t1, p.liquid_share_t2 - h)) / (2 * h);
            worst = std::max({worst, rel(fd1, d.d_phi1), rel(fd2, d.d_phi2)});
        }
    }
    return {sign_bad == 0 && worst <= 1e-6,
            fmt::format("{} sign violations, worst relative gap {:.2e}", sign_bad, worst)};
}

// 5. CRRA continuity at sigma = 1e-8, solver vs oracle clearing price at
// sigma in {0.5, 1, 2, 4}, FOC residuals. 7. q_a <= q_n and p0_a <= p0_n.
struct CrraFindings {
    Outcome consistency;
    Outcome dominance;
};

CrraFindings crra_consistency() {
    const ModelParams tiny = with_sigma(1e-8);
    const double cont = std::max({rel(solve_equity_crra(tiny).price, solve_equity_rn(tiny).price),
                                  rel(solve_equity_crra(tiny).payoff, solve_equity_rn(tiny).payoff),
                                  rel(solve_token_crra(tiny).price, solve_token_rn(tiny).price),
                                  rel(solve_token_crra(tiny).payoff, solve_token_rn(tiny).payoff)});

    std::vector<ModelParams> points(3);
    points[1].early_prob = 0.05;
    points[1].liquid_share_t1 = 0.25;
    points[2].early_prob = 0.2;
    points[2].liquid_share_t1 = 0.8;
    points[2].liquid_share_t2 = 0.6;

    int priced = 0, none = 0, disagree = 0, dominance_bad = 0;
    double worst_rel = 0.0, worst_foc = 0.0;
    std::string none_where;
    for (const ModelParams& base : points) {
        const double qn = solve_equity_rn(base).price;
        const double pn = solve_token_rn(base).price;
        for (double sigma : {0.5, 1.0, 2.0, 4.0}) {
            ModelParams p = base;
            p.risk_aversion = sigma;
            for (Asset asset : {Asset::Equity, Asset::Token}) {
                std::optional<double> solver;
                try {
                    if (asset == Asset::Equity) {
                        const CrraEquitySolution s = solve_equity_crra(p);
                        solver = s.price;
                        worst_foc = std::max(worst_foc, foc_residual(p, s).max_abs());
                        if (s.price > qn) ++dominance_bad;
                    } else {
                        const CrraTokenSolution s = solve_token_crra(p);
                        solver = s.price;
                        worst_foc = std::max(worst_foc, foc_residual(p, s).max_abs());
                        if (s.price > pn) ++dominance_bad;
                    }
                } catch (const ModelError& e) {
                    if (e.kind() != ErrorKind::NoEquilibrium) ++disagree;
                }
                std::optional<double> oracle;
                try {
                    oracle = find_clearing_price(p, asset);
                } catch (const ModelError&) {
                }
                if (solver && oracle) {
                    ++priced;
                    worst_rel = std::max(worst_rel, rel(*solver, *oracle));
                } else if (!solver && !oracle) {
                    ++none;
                    none_where += fmt::format(" {}@lambda={},sigma={}", to_string(asset),
                                              p.early_prob, sigma);
                } else {
                    ++disagree;
                }
            }
        }
    }
    const bool ok = cont <= 1e-6 && disagree == 0 && worst_rel <= 1e-3 && worst_foc <= 1e-8;
    return {{ok, fmt::format("continuity {:.1e}; {} priced pairs, worst rel {:.1e}; FOC {:.1e}; "
                             "{} agreed no-equilibrium:{}",
                             cont, priced, worst_rel, worst_foc, none, none_where)},
            {dominance_bad == 0, fmt::format("{} violations", dominance_bad)}};
}

// 6. Payoffs vs sigma at lambda = 0.1 on [0, 5] step 0.25.
Outcome figure_ordering() {
    const auto rows = figure1_data(ModelParams{}, figure1_grid());
    bool monotone = true, ordered = true, equity_returns = false, lost = false;
    double last_equity = rows.front().equity_payoff;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SweepRow& r = rows[i];
        if (!r.token_ok()) monotone = false;
        if (i > 0 && r.token_payoff > rows[i - 1].token_payoff) monotone = false;
        if (r.equity_ok()) {
            if (lost) equity_returns = true;
            if (r.equity_payoff > last_equity) monotone = false;
            last_equity = r.equity_payoff;
            if (r.token_payoff < r.equity_payoff) ordered = false;
        } else {
            lost = true;
        }
    }
    const double equity_to_last = rows.front().equity_payoff - last_equity;
    const double token_decline = rows.front().token_payoff - rows.back().token_payoff;
    const SweepRow& at2 = rows[8];
    const bool spot = std::abs(at2.equity_payoff - 2.5942) <= 1e-3 &&
                      std::abs(at2.token_payoff - 10.3541) <= 1e-3;
    const bool ok = monotone && !equity_returns && ordered && equity_to_last > token_decline && spot;
    return {ok, fmt::format("equity decline {:.4f} (to last solved sigma; no equity equilibrium "
                            "beyond), token decline {:.4f}; sigma=2 payoffs {:.4f}/{:.4f}",
                            equity_to_last, token_decline, at2.equity_payoff, at2.token_payoff)};
}

// 8. The CLI's verify subcommand: exit 0 at the default point, exit 2 with a
// per-check table when a check fails.
Outcome cli_verify() {
    auto run = [](const std::string& args, std::string& output) {
        const std::string cmd = std::string(TOKENFIN_CLI_PATH) + " verify " + args + " 2>&1";
        FILE* pipe = popen(cmd.c_str(), "r");
        if (!pipe) return -1;
        std::array<char, 512> buf{};
        while (fgets(buf.data(), buf.size(), pipe)) output += buf.data();
        const int status = pclose(pipe);
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    std::string ok_out, bad_out;
    const int ok_code = run("", ok_out);
    // phi1 = 0.2 drives the token payoff negative at high sigma, so the
    // decline-ordering property genuinely fails there.
    const int bad_code = run("--phi1 0.2", bad_out);
    const bool table = bad_out.find("FAIL") != std::string::npos &&
                       bad_out.find("PASS") != std::string::npos;
    return {ok_code == 0 && bad_code == 2 && table,
            fmt::format("default exit {}, failing point exit {} (per-check table: {})", ok_code,
                        bad_code, table ? "yes" : "no")};
}

struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

} // namespace

int main() {
    CrraFindings crra{};
    const std::vector<Criterion> criteria{
        {"C1 closed-form reproduction", 0.1, closed_form_reproduction},
        {"C2 token dominance, 1000 draws", 1.0, token_dominance},
        {"C3 equity and bond limits", 0.1, limit_identities},
        {"C4 payoff slopes vs finite differences", 1.0, slope_check},
        {"C5 CRRA continuity, oracle agreement, FOCs", 10.0,
         [&] {
             crra = crra_consistency();
             return crra.consistency;
         }},
        {"C6 payoff vs sigma ordering", 5.0, figure_ordering},
        {"C7 CRRA prices below risk-neutral", 10.0,
         [&] { return crra.dominance; }},
        {"C8 verify subcommand", 60.0, cli_verify},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out{false, ""};
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_budget = seconds <= c.budget_seconds;
        const bool passed = out.passed && in_budget;
        failures += passed ? 0 : 1;
        fmt::print("[{}] {:<44} {:7.3f}s  {}{}\n", passed ? "PASS" : "FAIL", c.name, seconds,
                   out.detail, in_budget ? "" : " (over time budget)");
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
