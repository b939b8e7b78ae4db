#include "tokenfin/cli_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace tokenfin {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

} // namespace

ParamOverrides parse_config_text(std::string_view text) {
    ParamOverrides out;
    int line_no = 0;
    for (std::string_view line : split(text, '\n')) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ModelError(ErrorKind::Parse,
                             fmt::format("line {}: expected key = value", line_no));
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (!parse_param_name(key))
            throw ModelError(ErrorKind::Parse,
                             fmt::format("line {}: unknown key '{}'", line_no, key));
        double v = 0;
        if (!parse_double(value, v))
            throw ModelError(ErrorKind::Parse, fmt::format("line {}: key '{}' has bad value '{}'",
                                                           line_no, key, value));
        if (!out.emplace(key, v).second)
            throw ModelError(ErrorKind::Parse,
                             fmt::format("line {}: key '{}' repeated", line_no, key));
    }
    return out;
}

ParamOverrides parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ModelError(ErrorKind::Parse, "cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config_text(buf.str());
    } catch (const ModelError& e) {
        throw ModelError(e.kind(), path.string() + ": " + e.detail());
    }
}

void apply_overrides(ModelParams& p, const ParamOverrides& overrides) {
    for (const auto& [key, value] : overrides) {
        const auto param = parse_param_name(key);
        if (!param) throw ModelError(ErrorKind::Parse, "unknown key '" + key + "'");
        param_ref(p, *param) = value;
    }
}

std::string format_number(double v, bool full_precision) {
    if (std::isnan(v)) return {};
    return full_precision ? fmt::format("{}", v) : fmt::format("{:.6f}", v);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, bool full_precision) {
    out << kSweepCsvHeader << '\n';
    for (const SweepRow& r : rows) {
        std::string flags;
        for (const std::string& f : r.flags) {
            if (!flags.empty()) flags += ';';
            flags += f;
        }
        out << format_number(r.grid_value, full_precision) << ','
            << format_number(r.equity_price, full_precision) << ','
            << format_number(r.token_price, full_precision) << ','
            << format_number(r.equity_return, full_precision) << ','
            << format_number(r.token_return, full_precision) << ','
            << format_number(r.equity_payoff, full_precision) << ','
            << format_number(r.token_payoff, full_precision) << ','
            << format_number(r.payoff_diff, full_precision) << ',' << flags << '\n';
    }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kSweepCsvHeader)
        throw ModelError(ErrorKind::Parse, "sweep CSV header mismatch");

    std::vector<SweepRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(trim(line), ',');
        if (fields.size() != 9)
            throw ModelError(ErrorKind::Parse, fmt::format("line {}: expected 9 fields", line_no));

        double values[8];
        for (int i = 0; i < 8; ++i) {
            if (fields[i].empty()) {
                values[i] = std::numeric_limits<double>::quiet_NaN();
            } else if (!parse_double(fields[i], values[i])) {
                throw ModelError(ErrorKind::Parse, fmt::format("line {}: bad number '{}'",
                                                               line_no, fields[i]));
            }
        }
        SweepRow r;
        r.grid_value = values[0];
        r.equity_price = values[1];
        r.token_price = values[2];
        r.equity_return = values[3];
        r.token_return = values[4];
        r.equity_payoff = values[5];
        r.token_payoff = values[6];
        r.payoff_diff = values[7];
        if (!fields[8].empty())
            for (std::string_view f : split(fields[8], ';')) r.flags.emplace_back(f);
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

// Round number spacing giving roughly `target` ticks over `span`.
double tick_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (m * mag >= raw) return m * mag;
    return 10.0 * mag;
}

} // namespace

void write_figure_svg(std::ostream& out, const std::vector<SweepRow>& rows) {
    constexpr double kWidth = 800, kHeight = 600;
    constexpr double kLeft = 90, kRight = 30, kTop = 50, kBottom = 70;

    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const SweepRow& r : rows) {
        x_lo = std::min(x_lo, r.grid_value);
        x_hi = std::max(x_hi, r.grid_value);
        for (double y : {r.equity_payoff, r.token_payoff}) {
            if (std::isnan(y)) continue;
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    if (!(x_lo < x_hi)) x_hi = x_lo + 1.0;
    if (!std::isfinite(y_lo)) y_lo = 0.0, y_hi = 1.0;
    y_lo = std::min(y_lo, 0.0);
    if (!(y_lo < y_hi)) y_hi = y_lo + 1.0;
    const double y_step = tick_step(y_hi - y_lo, 6);
    y_lo = std::floor(y_lo / y_step) * y_step;
    y_hi = std::ceil(y_hi / y_step) * y_step;
    const double x_step = tick_step(x_hi - x_lo, 10);

    auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * (kWidth - kLeft - kRight); };
    auto sy = [&](double y) {
        return kHeight - kBottom - (y - y_lo) / (y_hi - y_lo) * (kHeight - kTop - kBottom);
    };

    out << R"(<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 600" width="800" height="600">)"
        << '\n';
    out << R"(<rect x="0" y="0" width="800" height="600" fill="white"/>)" << '\n';
    out << fmt::format(R"(<text x="400" y="30" text-anchor="middle" font-size="18">)"
                       "Entrepreneur payoff, equity vs token</text>\n");

    // axes
    out << fmt::format(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="black"/>)"
                       "\n",
                       sx(x_lo), sy(y_lo), sx(x_hi), sy(y_lo));
    out << fmt::format(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="black"/>)"
                       "\n",
                       sx(x_lo), sy(y_lo), sx(x_lo), sy(y_hi));
    for (double x = x_lo; x <= x_hi + 1e-9 * x_step; x += x_step) {
        out << fmt::format(R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{0:.2f}" y2="{2:.2f}" stroke="black"/>)"
                           "\n",
                           sx(x), sy(y_lo), sy(y_lo) + 6);
        out << fmt::format(R"(<text x="{:.2f}" y="{:.2f}" text-anchor="middle" font-size="12">{:g}</text>)"
                           "\n",
                           sx(x), sy(y_lo) + 22, x);
    }
    for (double y = y_lo; y <= y_hi + 1e-9 * y_step; y += y_step) {
        out << fmt::format(R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{2:.2f}" y2="{1:.2f}" stroke="black"/>)"
                           "\n",
                           sx(x_lo) - 6, sy(y), sx(x_lo));
        out << fmt::format(R"(<text x="{:.2f}" y="{:.2f}" text-anchor="end" font-size="12">{:g}</text>)"
                           "\n",
                           sx(x_lo) - 10, sy(y) + 4, y);
    }
    out << fmt::format(R"(<text x="{:.2f}" y="{:.2f}" text-anchor="middle" font-size="14">sigma</text>)"
                       "\n",
                       (sx(x_lo) + sx(x_hi)) / 2, kHeight - 20);
    out << fmt::format(R"(<text x="25" y="{:.2f}" text-anchor="middle" font-size="14" )"
                       R"svg(transform="rotate(-90 25 {:.2f})">entrepreneur payoff</text>)svg"
                       "\n",
                       (sy(y_lo) + sy(y_hi)) / 2, (sy(y_lo) + sy(y_hi)) / 2);

    auto polyline = [&](std::string_view id, std::string_view color, auto pick) {
        std::string points;
        for (const SweepRow& r : rows) {
            const double y = pick(r);
            if (std::isnan(y)) continue;
            if (!points.empty()) points += ' ';
            points += fmt::format("{:.2f},{:.2f}", sx(r.grid_value), sy(y));
        }
        out << fmt::format(R"(<polyline id="{}" fill="none" stroke="{}" stroke-width="2" points="{}"/>)"
                           "\n",
                           id, color, points);
    };
    polyline("equity", "#c0392b", [](const SweepRow& r) { return r.equity_payoff; });
    polyline("token", "#2471a3", [](const SweepRow& r) { return r.token_payoff; });

    out << R"(<text x="680" y="70" font-size="13" fill="#2471a3">token</text>)" << '\n';
    out << R"(<text x="680" y="90" font-size="13" fill="#c0392b">equity</text>)" << '\n';
    out << "</svg>\n";
}

} // namespace tokenfin
