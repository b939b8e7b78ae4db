#pragma once

#include "tokenfin/closed_form.hpp"
#include "tokenfin/model.hpp"

#include <optional>

namespace tokenfin {

/// Settings for the one-dimensional equilibrium solves.
///
/// The unknown is the share sold (equity) or the t=0 price (token). When a
/// bracket bound is unset the solver uses e in [1e-9, 1] for equity and
/// p0 in [1e-9, 1/R + 1] for tokens. The bracket is first scanned at
/// `scan_points` + 1 uniform abscissae for sign changes of the residual; the
/// leftmost change is then bisected.
struct FixedPointConfig {
    double tol = 1e-12;
    int max_iter = 200;
    std::optional<double> bracket_lo;
    std::optional<double> bracket_hi;
    int scan_points = 512;
};

struct FixedPointDiagnostics {
    int iterations = 0;
    double residual = 0;
    double bracket_lo = 0;
    double bracket_hi = 0;
    bool multiple_roots = false; // another admissible root lies to the right
};

struct CrraEquitySolution {
    double price = 0;               // q_a
    double share_sold = 0;          // e_a
    double required_return = 0;     // Pi / q_a
    double payoff = 0;
    double consumption_early = 0;   // B0 R
    double consumption_late = 0;    // B0 R^2 + e_a Pi
    double risk_premium_factor = 0; // lambda (c2/c1)^sigma + 1 - lambda
    FixedPointDiagnostics diagnostics;
};

struct CrraTokenSolution {
    double price = 0;             // p0_a
    double tokens_sold = 0;
    double required_return = 0;   // 1 / p0_a
    double payoff = 0;
    double consumption_early = 0; // B0 R + phi1 T0
    double consumption_late = 0;  // c1 R + phi2 (1 - phi1) T0
    double smoothing_ratio = 0;   // c1^s / (lambda c2^s + (1 - lambda) c1^s)
    FixedPointDiagnostics diagnostics;
};

struct PayoffPair {
    double equity = 0;
    double token = 0;
};

/// (c^(1-sigma) - 1) / (1 - sigma), with log(c) at sigma = 1.
double crra_utility(double consumption, double sigma);

/// lambda ratio^sigma + 1 - lambda, evaluated in log space once
/// sigma |log ratio| exceeds 200. May return +inf.
double risk_premium_factor(double consumption_ratio, double early_prob, double sigma);

CrraEquitySolution solve_equity_crra(const ModelParams& p, const FixedPointConfig& cfg = {});
CrraTokenSolution solve_token_crra(const ModelParams& p, const FixedPointConfig& cfg = {});

/// Both entrepreneur payoffs at one point; risk-neutral closed forms when
/// sigma = 0. A failing leg is rethrown with its name prefixed.
PayoffPair payoff_pair(const ModelParams& p, const FixedPointConfig& cfg = {});

} // namespace tokenfin
