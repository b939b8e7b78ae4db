#include "tokenfin/crra.hpp"

#include "tokenfin/closed_form.hpp"

#include <doctest.h>

#include <cmath>

using namespace tokenfin;

namespace {

ModelParams with_sigma(double sigma) {
    ModelParams p;
    p.risk_aversion = sigma;
    return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST_CASE("crra utility") {
    for (double s : {0.0, 0.5, 1.0, 2.0, 7.0}) CHECK(crra_utility(1.0, s) == 0.0);
    CHECK(crra_utility(3.0, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(crra_utility(2.0, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(crra_utility(std::exp(1.0), 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    // continuous through sigma = 1
    CHECK(crra_utility(4.0, 1.0 + 1e-9) == doctest::Approx(std::log(4.0)).epsilon(1e-8));
    CHECK_THROWS_AS(crra_utility(0.0, 2.0), ModelError);
    CHECK_THROWS_AS(crra_utility(-1.0, 0.0), ModelError);
}

TEST_CASE("risk premium factor") {
    CHECK(risk_premium_factor(3.0, 0.0, 5.0) == 1.0);
    CHECK(risk_premium_factor(3.0, 0.25, 0.0) == doctest::Approx(1.0));
    CHECK(risk_premium_factor(2.0, 0.5, 2.0) == doctest::Approx(0.5 * 4 + 0.5));
    // log-space branch agrees with the direct formula near the switch-over
    const double direct = 0.1 * std::pow(10.0, 86.0) + 0.9;
    CHECK(risk_premium_factor(10.0, 0.1, 86.0) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(risk_premium_factor(10.0, 0.1, 90.0) == doctest::Approx(0.1 * std::pow(10.0, 90.0)).epsilon(1e-12));
    CHECK(std::isinf(risk_premium_factor(10.0, 0.1, 400.0)));
}

// Frozen values: 30-digit root of e = I R^2 [lambda ((B0 R^2 + e Pi)/(B0 R))^2 + 1 - lambda] / ((1 - lambda) Pi)
// at the default point, B0 = W - I. The smaller of the two positive roots is
// 0.8418, the other is ~1.23 (outside the admissible range).
TEST_CASE("CRRA equity at sigma = 2") {
    const CrraEquitySolution s = solve_equity_crra(with_sigma(2.0));
    CHECK(s.share_sold == doctest::Approx(0.841799968576862).epsilon(1e-10));
    CHECK(s.price == doctest::Approx(5.939653345975941).epsilon(1e-10));
    CHECK(s.required_return == doctest::Approx(2.761103896932107).epsilon(1e-10));
    CHECK(s.payoff == doctest::Approx(2.594480515339464).epsilon(1e-9));
    CHECK(s.share_sold * s.price == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(s.consumption_early == doctest::Approx(5.25));
    CHECK(std::abs(s.diagnostics.residual) <= 1e-12);
    CHECK_FALSE(s.diagnostics.multiple_roots);
    // pricing identity at the solution
    const ModelParams p = with_sigma(2.0);
    const double pi = future_profit(p);
    CHECK(s.price == doctest::Approx(0.9 * pi / (1.05 * 1.05 * s.risk_premium_factor)).epsilon(1e-11));
    CHECK(s.price <= solve_equity_rn(p).price);
}

TEST_CASE("CRRA equity limits") {
    const EquitySolution rn = solve_equity_rn(ModelParams{});
    const CrraEquitySolution zero = solve_equity_crra(with_sigma(0.0));
    CHECK(zero.price == doctest::Approx(rn.price).epsilon(1e-11));
    CHECK(zero.payoff == doctest::Approx(rn.payoff).epsilon(1e-12));
    CHECK(zero.risk_premium_factor == 1.0);

    for (double sigma : {0.5, 3.0, 8.0}) {
        ModelParams p = with_sigma(sigma);
        p.early_prob = 0.0;
        const CrraEquitySolution s = solve_equity_crra(p);
        CHECK(s.price == doctest::Approx(future_profit(p) / (1.05 * 1.05)).epsilon(1e-11));
    }
}

TEST_CASE("CRRA equity failure modes") {
    ModelParams p = with_sigma(4.0); // past the fold at sigma ~ 2.015
    try {
        solve_equity_crra(p);
        FAIL("expected NoEquilibrium");
    } catch (const ModelError& e) {
        CHECK(e.kind() == ErrorKind::NoEquilibrium);
    }

    p = with_sigma(2.0);
    p.early_prob = 1.0;
    CHECK_THROWS_AS(solve_equity_crra(p), ModelError);

    p = with_sigma(2.0);
    FixedPointConfig cfg;
    cfg.max_iter = 3;
    try {
        solve_equity_crra(p, cfg);
        FAIL("expected ConvergenceFailure");
    } catch (const ModelError& e) {
        CHECK(e.kind() == ErrorKind::ConvergenceFailure);
    }

    cfg = {};
    cfg.bracket_lo = 0.5;
    cfg.bracket_hi = 0.4;
    CHECK_THROWS_AS(solve_equity_crra(p, cfg), ModelError);
}

TEST_CASE("CRRA equity flags a second admissible root") {
    // Widening the bracket past one exposes the upper root near 1.23.
    FixedPointConfig cfg;
    cfg.bracket_hi = 1.5;
    const CrraEquitySolution s = solve_equity_crra(with_sigma(2.0), cfg);
    CHECK(s.diagnostics.multiple_roots);
    CHECK(s.share_sold == doctest::Approx(0.841799968576862).epsilon(1e-10));
}

TEST_CASE("CRRA token at sigma = 2") {
    const CrraTokenSolution s = solve_token_crra(with_sigma(2.0));
    CHECK(s.price == doctest::Approx(0.8476788226961348).epsilon(1e-10));
    CHECK(s.tokens_sold == doctest::Approx(5.898460438231729).epsilon(1e-10));
    CHECK(s.payoff == doctest::Approx(10.354078050812477).epsilon(1e-10));
    CHECK(s.price * s.tokens_sold == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(std::abs(s.diagnostics.residual) <= 1e-12);
    const double expected_price =
        0.5 / 1.05 + 0.9 * 0.5 / (1.05 * 1.05) * s.smoothing_ratio;
    CHECK(s.price == doctest::Approx(expected_price).epsilon(1e-11));
    CHECK(s.price <= solve_token_rn(ModelParams{}).price);
    CHECK(s.consumption_late == doctest::Approx(s.consumption_early * 1.05 + 0.5 * s.tokens_sold));
}

TEST_CASE("CRRA token limits") {
    const TokenSolution rn = solve_token_rn(ModelParams{});
    const CrraTokenSolution zero = solve_token_crra(with_sigma(0.0));
    CHECK(zero.price == doctest::Approx(rn.price).epsilon(1e-11));
    CHECK(zero.payoff == doctest::Approx(rn.payoff).epsilon(1e-11));

    for (double sigma : {0.5, 2.0, 10.0}) {
        ModelParams p = with_sigma(sigma);
        p.liquid_share_t1 = 1.0;
        CHECK(solve_token_crra(p).price == doctest::Approx(1.0 / 1.05).epsilon(1e-11));
    }

    ModelParams p = with_sigma(2.0);
    p.liquid_share_t1 = 0.0;
    p.liquid_share_t2 = 0.0;
    try {
        solve_token_crra(p);
        FAIL("expected IlliquidToken");
    } catch (const ModelError& e) {
        CHECK(e.kind() == ErrorKind::IlliquidToken);
    }
}

TEST_CASE("CRRA token survives very high risk aversion") {
    const CrraTokenSolution s = solve_token_crra(with_sigma(300.0));
    CHECK(s.price >= 0.5 / 1.05 - 1e-12); // liquid part is a floor, up to solver tol
    CHECK(s.price < solve_token_rn(ModelParams{}).price);
}

TEST_CASE("continuity at sigma -> 0") {
    const ModelParams p = with_sigma(1e-8);
    const EquitySolution en = solve_equity_rn(p);
    const TokenSolution tn = solve_token_rn(p);
    const CrraEquitySolution ea = solve_equity_crra(p);
    const CrraTokenSolution ta = solve_token_crra(p);
    CHECK(rel(ea.price, en.price) <= 1e-6);
    CHECK(rel(ea.payoff, en.payoff) <= 1e-6);
    CHECK(rel(ta.price, tn.price) <= 1e-6);
    CHECK(rel(ta.payoff, tn.payoff) <= 1e-6);
}

TEST_CASE("price dominance and monotone payoffs over a sigma grid") {
    const ModelParams rn;
    const double qn = solve_equity_rn(rn).price;
    const double pn = solve_token_rn(rn).price;
    double prev_equity = solve_equity_rn(rn).payoff, prev_token = solve_token_rn(rn).payoff;
    for (int k = 1; k <= 20; ++k) {
        const ModelParams p = with_sigma(0.25 * k);
        const CrraTokenSolution t = solve_token_crra(p);
        CHECK(t.price <= pn);
        CHECK(t.payoff <= prev_token);
        prev_token = t.payoff;
        if (k <= 8) {
            const CrraEquitySolution e = solve_equity_crra(p);
            CHECK(e.price <= qn);
            CHECK(e.payoff <= prev_equity);
            CHECK(t.payoff >= e.payoff);
            prev_equity = e.payoff;
        } else {
            CHECK_THROWS_AS(solve_equity_crra(p), ModelError);
        }
    }
}

TEST_CASE("payoff pair") {
    const PayoffPair rn = payoff_pair(ModelParams{});
    CHECK(rn.equity == doctest::Approx(10.275).epsilon(1e-14));
    CHECK(rn.token == doctest::Approx(10.6048076923076923).epsilon(1e-14));

    const PayoffPair two = payoff_pair(with_sigma(2.0));
    CHECK(two.equity == doctest::Approx(2.594480515339464).epsilon(1e-9));
    CHECK(two.token == doctest::Approx(10.354078050812477).epsilon(1e-10));
    CHECK(two.token >= two.equity);

    try {
        payoff_pair(with_sigma(4.0));
        FAIL("expected the equity leg to fail");
    } catch (const ModelError& e) {
        CHECK(e.kind() == ErrorKind::NoEquilibrium);
        CHECK(std::string(e.what()).find("equity leg") != std::string::npos);
    }
}

TEST_CASE("token sold only at t=2 replicates equity under CRRA too") {
    for (double sigma : {0.5, 1.0, 2.0}) {
        ModelParams p = with_sigma(sigma);
        p.liquid_share_t1 = 0.0;
        p.liquid_share_t2 = 1.0;
        const CrraEquitySolution e = solve_equity_crra(p);
        const CrraTokenSolution t = solve_token_crra(p);
        // tokens sold correspond to the equity claim e Pi
        CHECK(t.tokens_sold == doctest::Approx(e.share_sold * future_profit(p)).epsilon(1e-9));
        CHECK(t.payoff == doctest::Approx(e.payoff).epsilon(1e-9));
        CHECK(t.required_return == doctest::Approx(e.required_return).epsilon(1e-9));
    }
}

TEST_CASE("token solver takes the highest-price root when two exist") {
    ModelParams p = with_sigma(2.0);
    p.liquid_share_t1 = 0.0;
    const CrraTokenSolution t = solve_token_crra(p);
    CHECK(t.diagnostics.multiple_roots);
    CHECK(t.price == doctest::Approx(5.939653345975941 / 16.4).epsilon(1e-9));

    // restricting the bracket below the upper root leaves only the lower one
    FixedPointConfig cfg;
    cfg.bracket_hi = 0.3;
    const CrraTokenSolution low = solve_token_crra(p, cfg);
    CHECK_FALSE(low.diagnostics.multiple_roots);
    CHECK(low.price < 0.3);
    CHECK(low.payoff < t.payoff);
}
