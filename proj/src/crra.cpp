#include "tokenfin/crra.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace tokenfin {

namespace {

struct Root {
    double x;
    FixedPointDiagnostics diagnostics;
};

bool sign_change(double a, double b) { return (a < 0.0) != (b < 0.0); }

enum class Pick { Leftmost, Rightmost };

// Root of `residual` on [lo, hi] nearest the chosen end: coarse scan for sign
// changes, then bisection to |residual| <= tol.
Root bracketed_root(const std::function<double(double)>& residual, double lo, double hi,
                    Pick pick, const FixedPointConfig& cfg) {
    if (!(cfg.tol > 0.0) || !(lo < hi) || cfg.max_iter < 1 || cfg.scan_points < 1)
        throw ModelError(ErrorKind::Domain, "invalid fixed-point configuration");

    FixedPointDiagnostics diag;
    diag.bracket_lo = lo;
    diag.bracket_hi = hi;

    const int n = cfg.scan_points;
    std::vector<double> xs(n + 1), hs(n + 1);
    for (int i = 0; i <= n; ++i) {
        xs[i] = i == n ? hi : lo + (hi - lo) * static_cast<double>(i) / n;
        hs[i] = residual(xs[i]);
    }

    // Roots in scan order: exact zeros at sample points, or cells [i, i+1]
    // whose nonzero endpoint residuals differ in sign.
    struct Candidate {
        int index;
        bool exact;
    };
    std::vector<Candidate> found;
    for (int i = 0; i <= n; ++i) {
        if (hs[i] == 0.0) found.push_back({i, true});
        else if (i < n && hs[i + 1] != 0.0 && sign_change(hs[i], hs[i + 1]))
            found.push_back({i, false});
    }
    if (found.empty())
        throw ModelError(ErrorKind::NoEquilibrium,
                         "fixed-point residual has no sign change on the bracket");
    diag.multiple_roots = found.size() > 1;
    const Candidate chosen = pick == Pick::Leftmost ? found.front() : found.back();
    if (chosen.exact) return {xs[chosen.index], diag};
    const int cell = chosen.index;

    double a = xs[cell], b = xs[cell + 1];
    double ha = hs[cell];
    for (int it = 1; it <= cfg.max_iter; ++it) {
        const double mid = 0.5 * (a + b);
        const double hm = residual(mid);
        diag.iterations = it;
        diag.residual = hm;
        if (std::abs(hm) <= cfg.tol) return {mid, diag};
        if (mid <= a || mid >= b) break; // bracket exhausted at double resolution
        if (sign_change(ha, hm)) {
            b = mid;
        } else {
            a = mid;
            ha = hm;
        }
    }
    throw ModelError(ErrorKind::ConvergenceFailure,
                     "bisection stopped after " + std::to_string(diag.iterations) +
                         " iterations with residual " + std::to_string(diag.residual));
}

} // namespace

double crra_utility(double consumption, double sigma) {
    if (!(consumption > 0.0))
        throw ModelError(ErrorKind::Domain, "CRRA utility needs positive consumption");
    const double log_c = std::log(consumption);
    if (sigma == 1.0) return log_c;
    const double k = 1.0 - sigma;
    return std::expm1(k * log_c) / k;
}

double risk_premium_factor(double consumption_ratio, double early_prob, double sigma) {
    if (early_prob == 0.0) return 1.0;
    const double log_ratio = std::log(consumption_ratio);
    if (sigma * std::abs(log_ratio) <= 200.0)
        return early_prob * std::pow(consumption_ratio, sigma) + 1.0 - early_prob;
    // log(lambda r^s + (1 - lambda)) via log-sum-exp
    const double a = std::log(early_prob) + sigma * log_ratio;
    if (early_prob == 1.0) return std::exp(a);
    const double b = std::log1p(-early_prob);
    const double m = std::max(a, b);
    return std::exp(m + std::log(std::exp(a - m) + std::exp(b - m)));
}

CrraEquitySolution solve_equity_crra(const ModelParams& p, const FixedPointConfig& cfg) {
    if (p.early_prob >= 1.0)
        throw ModelError(ErrorKind::Degenerate, "equity price is zero when lambda = 1");
    const double pi = future_profit(p);
    if (!(pi > 0.0)) throw ModelError(ErrorKind::CannotFinance, "future profit is not positive");

    const double R = p.gross_rate;
    const double lam = p.early_prob;
    const double sigma = p.risk_aversion;
    const double bonds = bond_holding(p);
    const double c1 = bonds * R;
    const double rn_share = p.investment * R * R / ((1.0 - lam) * pi);

    auto premium = [&](double share) {
        return risk_premium_factor((bonds * R * R + share * pi) / c1, lam, sigma);
    };
    // e - I R^2 [lambda (c2/c1)^sigma + 1 - lambda] / ((1 - lambda) Pi)
    auto residual = [&](double share) { return share - rn_share * premium(share); };

    // Smallest admissible share: the highest price, i.e. the cheapest financing.
    const Root root = bracketed_root(residual, cfg.bracket_lo.value_or(1e-9),
                                     cfg.bracket_hi.value_or(1.0), Pick::Leftmost, cfg);

    CrraEquitySolution s;
    s.share_sold = root.x;
    s.price = p.investment / root.x;
    s.required_return = pi / s.price;
    s.risk_premium_factor = premium(root.x);
    s.payoff = pi - p.investment * R * R / (1.0 - lam) * s.risk_premium_factor;
    s.consumption_early = c1;
    s.consumption_late = bonds * R * R + root.x * pi;
    s.diagnostics = root.diagnostics;
    return s;
}

CrraTokenSolution solve_token_crra(const ModelParams& p, const FixedPointConfig& cfg) {
    if (!(token_price_rn(p) > 0.0))
        throw ModelError(ErrorKind::IlliquidToken, "token price is zero; it cannot raise I");

    const double R = p.gross_rate;
    const double lam = p.early_prob;
    const double phi1 = p.liquid_share_t1;
    const double late_resale = p.liquid_share_t2 * (1.0 - phi1);
    const double sigma = p.risk_aversion;
    const double bonds = bond_holding(p);
    const double liquid_part = phi1 / R;
    const double late_part = (1.0 - lam) * late_resale / (R * R);

    struct Consumption {
        double early, late;
    };
    auto consumption = [&](double price) {
        const double tokens = p.investment / price;
        const double c1 = bonds * R + phi1 * tokens;
        return Consumption{c1, c1 * R + late_resale * tokens};
    };
    // c1^s / (lambda c2^s + (1 - lambda) c1^s) = 1 / (lambda (c2/c1)^s + 1 - lambda)
    auto smoothing = [&](double price) {
        const Consumption c = consumption(price);
        return 1.0 / risk_premium_factor(c.late / c.early, lam, sigma);
    };
    auto residual = [&](double price) {
        return price - (liquid_part + late_part * smoothing(price));
    };

    // Highest price: fewest tokens sold, the cheapest financing.
    const Root root = bracketed_root(residual, cfg.bracket_lo.value_or(1e-9),
                                     cfg.bracket_hi.value_or(1.0 / R + 1.0), Pick::Rightmost, cfg);

    CrraTokenSolution s;
    s.price = root.x;
    s.tokens_sold = p.investment / root.x;
    s.required_return = 1.0 / root.x;
    s.payoff = future_profit(p) - resale_weight(p) * s.tokens_sold;
    const Consumption c = consumption(root.x);
    s.consumption_early = c.early;
    s.consumption_late = c.late;
    s.smoothing_ratio = smoothing(root.x);
    s.diagnostics = root.diagnostics;
    return s;
}

PayoffPair payoff_pair(const ModelParams& p, const FixedPointConfig& cfg) {
    const bool neutral = p.risk_aversion == 0.0;
    PayoffPair out;
    try {
        out.equity = neutral ? solve_equity_rn(p).payoff : solve_equity_crra(p, cfg).payoff;
    } catch (const ModelError& e) {
        throw ModelError(e.kind(), "equity leg: " + e.detail());
    }
    try {
        out.token = neutral ? solve_token_rn(p).payoff : solve_token_crra(p, cfg).payoff;
    } catch (const ModelError& e) {
        throw ModelError(e.kind(), "token leg: " + e.detail());
    }
    return out;
}

} // namespace tokenfin
