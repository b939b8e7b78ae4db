#pragma once

#include "tokenfin/model.hpp"
#include "tokenfin/sweep.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace tokenfin {

/// Parameter values keyed by their config names (R, lambda, phi1, phi2, y1,
/// y2, omega, I, W, sigma).
using ParamOverrides = std::map<std::string, double>;

/// Parses a flat `key = value` document. Blank lines and `#` comments are
/// ignored. Unknown or repeated keys and malformed numbers throw Parse with
/// the line number.
ParamOverrides parse_config_text(std::string_view text);
ParamOverrides parse_config(const std::filesystem::path& path);

/// Applies overrides in place; throws Parse on an unknown key.
void apply_overrides(ModelParams& p, const ParamOverrides& overrides);

/// Fixed six decimals, or shortest round-trip digits when `full_precision`.
/// NaN prints as an empty field.
std::string format_number(double v, bool full_precision = false);

inline constexpr std::string_view kSweepCsvHeader =
    "grid_value,equity_price,token_price,equity_return,token_return,"
    "equity_payoff,token_payoff,payoff_diff,flags";

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     bool full_precision = false);

/// Inverse of write_sweep_csv. Throws Parse on a header mismatch or bad row.
std::vector<SweepRow> read_sweep_csv(std::istream& in);

/// Payoff-vs-sigma chart: 800x600 viewBox, polylines id="equity" and
/// id="token" over the rows where each leg solved.
void write_figure_svg(std::ostream& out, const std::vector<SweepRow>& rows);

} // namespace tokenfin
