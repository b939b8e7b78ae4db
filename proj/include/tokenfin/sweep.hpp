#pragma once

#include "tokenfin/crra.hpp"
#include "tokenfin/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tokenfin {

enum class SweepParam { Lambda, Phi1, Phi2, Sigma, R, I, W, Y1, Y2, Omega };

/// Config-file / CLI name of a parameter ("lambda", "phi1", ...).
std::string_view param_name(SweepParam param);
std::optional<SweepParam> parse_param_name(std::string_view name);

double& param_ref(ModelParams& p, SweepParam param);

/// Linear grid, endpoints inclusive.
struct GridSpec {
    SweepParam param = SweepParam::Sigma;
    double lo = 0.0;
    double hi = 1.0;
    int steps = 2;

    std::vector<double> values() const;
};

/// One comparative-statics point. Numbers for a failed leg are NaN and the
/// reason appears in `flags` as "<leg>:<ErrorKind>".
struct SweepRow {
    double grid_value = 0;
    double equity_price = 0;
    double token_price = 0;
    double equity_return = 0;
    double token_return = 0;
    double equity_payoff = 0;
    double token_payoff = 0;
    double payoff_diff = 0;
    std::vector<std::string> flags;

    bool equity_ok() const;
    bool token_ok() const;
};

enum class SweepColumn { PayoffDiff, EquityPayoff, TokenPayoff };

struct Crossing {
    double lo_value;  // grid value of the row before the crossing
    double hi_value;  // grid value of the row after
    double abscissa;  // linear interpolation between them
};

/// One row per grid value, in grid order. Throws Domain only for a malformed
/// grid; per-point failures become row flags.
std::vector<SweepRow> sweep_1d(const ModelParams& base, const GridSpec& grid,
                               const FixedPointConfig& cfg = {});

/// Sigma sweep at lambda = 0.1, the data behind the payoff-vs-risk-aversion chart.
std::vector<SweepRow> figure1_data(const ModelParams& base, const GridSpec& sigma_grid,
                                   const FixedPointConfig& cfg = {});

/// The default chart grid: sigma in [0, 5], step 0.25.
GridSpec figure1_grid();

/// Consecutive solved rows whose `column` values straddle `level`.
std::vector<Crossing> find_crossing(const std::vector<SweepRow>& rows, SweepColumn column,
                                    double level);

} // namespace tokenfin
