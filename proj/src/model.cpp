#include "tokenfin/model.hpp"

#include <cmath>
#include <string>

namespace tokenfin {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ModelError(ErrorKind::Domain, message);
}

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

} // namespace

ModelParams validate_params(const ModelParams& raw) {
    const double fields[] = {raw.gross_rate, raw.early_prob, raw.liquid_share_t1,
                             raw.liquid_share_t2, raw.output_t1, raw.output_t2,
                             raw.fixed_cost, raw.investment, raw.wealth,
                             raw.risk_aversion};
    for (double v : fields) require(std::isfinite(v), "all parameters must be finite");

    require(raw.gross_rate >= 1.0, "R must be >= 1");
    require(in_unit_interval(raw.early_prob), "lambda out of [0,1]");
    require(in_unit_interval(raw.liquid_share_t1), "phi1 out of [0,1]");
    require(in_unit_interval(raw.liquid_share_t2), "phi2 out of [0,1]");
    require(raw.output_t1 >= 0.0, "y1 must be >= 0");
    require(raw.output_t2 >= 0.0, "y2 must be >= 0");
    require(raw.fixed_cost >= 0.0, "omega must be >= 0");
    require(raw.investment > 0.0, "I must be > 0");
    require(raw.wealth > raw.investment, "W must exceed I");
    require(raw.risk_aversion >= 0.0, "sigma must be >= 0");
    return raw;
}

double future_profit(const ModelParams& p) {
    return (p.output_t1 - p.fixed_cost) * p.gross_rate + (p.output_t2 - p.fixed_cost);
}

} // namespace tokenfin
