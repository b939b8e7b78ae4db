#include "tokenfin/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace tokenfin {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct InvestorConsumption {
    double early, late;
};

InvestorConsumption consumption_of(const ModelParams& p, Asset asset, double quantity,
                                   double bonds) {
    const double R = p.gross_rate;
    if (asset == Asset::Equity) {
        const double pi = (p.output_t1 - p.fixed_cost) * R + p.output_t2 - p.fixed_cost;
        return {bonds * R, bonds * R * R + quantity * pi};
    }
    const double phi1 = p.liquid_share_t1;
    const double early = bonds * R + phi1 * quantity;
    return {early, early * R + p.liquid_share_t2 * (1.0 - phi1) * quantity};
}

double marginal_utility(double c, double sigma) {
    return sigma == 0.0 ? 1.0 : std::pow(c, -sigma);
}

double utility_or_neg_inf(const ModelParams& p, Asset asset, double price, double spend) {
    try {
        return expected_utility(p, asset, price, spend);
    } catch (const ModelError&) {
        return kNegInf;
    }
}

} // namespace

double FocResiduals::max_abs() const {
    return std::max({std::abs(bond), std::abs(asset), std::abs(budget)});
}

double expected_utility(const ModelParams& p, Asset asset, double price, double risky_spend) {
    if (!(price > 0.0)) throw ModelError(ErrorKind::Domain, "price must be positive");
    const double beta = 1.0 / p.gross_rate;
    const double lam = p.early_prob;
    const auto c = consumption_of(p, asset, risky_spend / price, p.wealth - risky_spend);
    const double sigma = p.risk_aversion;
    if (sigma == 0.0) return lam * beta * c.early + (1.0 - lam) * beta * beta * c.late;
    // A zero-probability branch contributes nothing even if its consumption is not positive.
    const double early = lam == 0.0 ? 0.0 : lam * beta * crra_utility(c.early, sigma);
    const double late =
        lam == 1.0 ? 0.0 : (1.0 - lam) * beta * beta * crra_utility(c.late, sigma);
    return early + late;
}

double grid_demand(const ModelParams& p, Asset asset, double price, int grid_points) {
    if (grid_points < 3) throw ModelError(ErrorKind::Domain, "grid_points must be >= 3");
    if (!(price > 0.0)) throw ModelError(ErrorKind::Domain, "price must be positive");

    const double top = p.wealth * (1.0 - 1e-9);
    const int n = grid_points - 1;
    auto at = [&](int i) { return i == n ? top : top * static_cast<double>(i) / n; };

    int best = 0;
    double best_u = utility_or_neg_inf(p, asset, price, at(0));
    for (int i = 1; i <= n; ++i) {
        const double u = utility_or_neg_inf(p, asset, price, at(i));
        if (u > best_u) {
            best_u = u;
            best = i;
        }
    }

    double a = at(std::max(best - 1, 0));
    double b = at(std::min(best + 1, n));
    const double width = 1e-9 * p.wealth;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = utility_or_neg_inf(p, asset, price, x1);
    double f2 = utility_or_neg_inf(p, asset, price, x2);
    while (b - a > width) {
        if (f1 >= f2) { // tie keeps the lower half
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = utility_or_neg_inf(p, asset, price, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = utility_or_neg_inf(p, asset, price, x2);
        }
    }
    const double refined = 0.5 * (a + b);
    // The refinement never moves off a grid point that beats it.
    return utility_or_neg_inf(p, asset, price, refined) >= best_u ? refined : at(best);
}

std::pair<double, double> default_price_bracket(const ModelParams& p, Asset asset) {
    const double R = p.gross_rate;
    if (asset == Asset::Equity) {
        const double pi = (p.output_t1 - p.fixed_cost) * R + p.output_t2 - p.fixed_cost;
        return {p.investment, pi / (R * R)};
    }
    return {1e-6, 1.0 / R};
}

double clearing_price(const ModelParams& p, Asset asset, double lo, double hi, int grid_points) {
    if (p.risk_aversion == 0.0)
        throw ModelError(ErrorKind::Bracket,
                         "linear utility gives set-valued demand; no unique clearing price");
    if (!(lo > 0.0) || !(lo < hi))
        throw ModelError(ErrorKind::Bracket, "price bracket must satisfy 0 < lo < hi");

    const double need = p.investment;
    const double target = 1e-6 * p.wealth;
    auto gap = [&](double price) { return grid_demand(p, asset, price, grid_points) - need; };

    const double gap_lo = gap(lo);
    if (std::abs(gap_lo) <= target) return lo;
    const double gap_hi = gap(hi);
    if (std::abs(gap_hi) <= target) return hi;
    if (!(gap_lo > 0.0 && gap_hi < 0.0))
        throw ModelError(ErrorKind::Bracket, "demand does not straddle I on the price bracket");

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g = gap(mid);
        if (std::abs(g) <= target || hi - lo <= 1e-14 * hi) return mid;
        (g > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double find_clearing_price(const ModelParams& p, Asset asset, int scan_points, int grid_points) {
    if (scan_points < 1) throw ModelError(ErrorKind::Domain, "scan_points must be >= 1");
    const auto [lo, hi] = default_price_bracket(p, asset);
    if (!(lo > 0.0) || !(lo < hi))
        throw ModelError(ErrorKind::Bracket, "default price bracket is empty");

    const double ratio = std::log(lo / hi);
    double upper = hi;
    double upper_gap = grid_demand(p, asset, upper, grid_points) - p.investment;
    for (int i = 1; i <= scan_points; ++i) {
        const double price = i == scan_points ? lo : hi * std::exp(ratio * i / scan_points);
        const double gap = grid_demand(p, asset, price, grid_points) - p.investment;
        if (upper_gap < 0.0 && gap > 0.0) return clearing_price(p, asset, price, upper, grid_points);
        upper = price;
        upper_gap = gap;
    }
    throw ModelError(ErrorKind::Bracket, "investor demand never reaches I on the price bracket");
}

FocResiduals foc_residual(const ModelParams& p, Asset asset, double price, double quantity) {
    const double R = p.gross_rate;
    const double beta = 1.0 / R;
    const double lam = p.early_prob;
    const double sigma = p.risk_aversion;
    const double bonds = p.wealth - p.investment;
    const auto c = consumption_of(p, asset, quantity, bonds);
    const double mu1 = marginal_utility(c.early, sigma);
    const double mu2 = marginal_utility(c.late, sigma);

    // d/dB0 of the objective: one unit of bonds pays R at t=1, R^2 at t=2.
    const double bond_marginal = lam * beta * mu1 * R + (1.0 - lam) * beta * beta * mu2 * R * R;

    // d/d(quantity) of the objective, per unit of the asset.
    double asset_marginal = 0.0;
    if (asset == Asset::Equity) {
        const double pi = (p.output_t1 - p.fixed_cost) * R + p.output_t2 - p.fixed_cost;
        asset_marginal = (1.0 - lam) * beta * beta * mu2 * pi;
    } else {
        const double phi1 = p.liquid_share_t1;
        const double phi2 = p.liquid_share_t2;
        asset_marginal = lam * beta * mu1 * phi1 +
                         (1.0 - lam) * beta * beta * mu2 * (phi1 * R + phi2 * (1.0 - phi1));
    }

    FocResiduals r;
    r.bond = bond_marginal - asset_marginal / price;
    r.asset = price - asset_marginal / bond_marginal;
    r.budget = p.investment - price * quantity;
    return r;
}

FocResiduals foc_residual(const ModelParams& p, const EquitySolution& s) {
    return foc_residual(p, Asset::Equity, s.price, s.share_sold);
}
FocResiduals foc_residual(const ModelParams& p, const TokenSolution& s) {
    return foc_residual(p, Asset::Token, s.price, s.tokens_sold);
}
FocResiduals foc_residual(const ModelParams& p, const CrraEquitySolution& s) {
    return foc_residual(p, Asset::Equity, s.price, s.share_sold);
}
FocResiduals foc_residual(const ModelParams& p, const CrraTokenSolution& s) {
    return foc_residual(p, Asset::Token, s.price, s.tokens_sold);
}

namespace {

struct Difference {
    double value;
    bool one_sided;
};

template <typename F>
Difference difference(F&& f, double x, double h) {
    if (x - h >= 0.0 && x + h <= 1.0) return {(f(x + h) - f(x - h)) / (2.0 * h), false};
    if (x + 2.0 * h <= 1.0) return {(-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h), true};
    return {(3.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (2.0 * h), true};
}

double relative_gap(double analytic, double abs_gap) {
    return abs_gap / std::max(std::abs(analytic), 1e-12);
}

} // namespace

FdReport fd_derivative_check(const ModelParams& p, double step) {
    auto payoff_at_phi1 = [&](double v) {
        ModelParams q = p;
        q.liquid_share_t1 = v;
        return solve_token_rn(q).payoff;
    };
    auto payoff_at_phi2 = [&](double v) {
        ModelParams q = p;
        q.liquid_share_t2 = v;
        return solve_token_rn(q).payoff;
    };

    const PayoffSlopes analytic = payoff_derivatives_rn(p);
    const Difference d1 = difference(payoff_at_phi1, p.liquid_share_t1, step);
    const Difference d2 = difference(payoff_at_phi2, p.liquid_share_t2, step);

    FdReport r;
    r.analytic_phi1 = analytic.d_phi1;
    r.numeric_phi1 = d1.value;
    r.analytic_phi2 = analytic.d_phi2;
    r.numeric_phi2 = d2.value;
    r.abs_gap_phi1 = std::abs(analytic.d_phi1 - d1.value);
    r.abs_gap_phi2 = std::abs(analytic.d_phi2 - d2.value);
    r.rel_gap_phi1 = relative_gap(analytic.d_phi1, r.abs_gap_phi1);
    r.rel_gap_phi2 = relative_gap(analytic.d_phi2, r.abs_gap_phi2);
    r.one_sided_phi1 = d1.one_sided;
    r.one_sided_phi2 = d2.one_sided;
    return r;
}

double indifference_slope(const ModelParams& p, Asset asset, double price) {
    const double h = 1e-3 * p.wealth;
    const double s = p.investment;
    return (expected_utility(p, asset, price, s + h) - expected_utility(p, asset, price, s - h)) /
           (2.0 * h);
}

OracleReport audit(const ModelParams& p, Asset asset, double price, int grid_points) {
    OracleReport r;
    r.asset = asset;
    r.price_tested = price;
    r.foc_residuals = foc_residual(p, asset, price, p.investment / price);
    if (p.risk_aversion == 0.0) {
        r.optimal_risky_spend = kNaN;
        r.clearing_gap = kNaN;
        r.indifference_slope = indifference_slope(p, asset, price);
        if (asset == Asset::Token) {
            try {
                r.fd_report = fd_derivative_check(p);
            } catch (const ModelError&) {
                // derivative undefined at this corner
            }
        }
    } else {
        r.optimal_risky_spend = grid_demand(p, asset, price, grid_points);
        r.clearing_gap = r.optimal_risky_spend - p.investment;
        r.indifference_slope = kNaN;
    }
    return r;
}

} // namespace tokenfin
