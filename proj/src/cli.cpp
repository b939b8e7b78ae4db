#include "tokenfin/cli.hpp"

#include "tokenfin/cli_io.hpp"
#include "tokenfin/closed_form.hpp"
#include "tokenfin/crra.hpp"
#include "tokenfin/oracle.hpp"
#include "tokenfin/verification.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <array>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace tokenfin {

namespace {

constexpr std::array<const char*, 10> kParamKeys{"R", "lambda", "phi1", "phi2", "y1",
                                                 "y2", "omega", "I", "W", "sigma"};

// One financing leg of `solve`, flattened for printing.
struct LegReport {
    std::string asset;
    bool ok = false;
    std::string error;
    std::vector<std::pair<std::string, double>> fields;
    std::vector<std::string> warnings;
};

void add_diagnostics(LegReport& leg, const FixedPointDiagnostics& d) {
    leg.fields.emplace_back("iterations", d.iterations);
    leg.fields.emplace_back("residual", d.residual);
    leg.fields.emplace_back("bracket_lo", d.bracket_lo);
    leg.fields.emplace_back("bracket_hi", d.bracket_hi);
    if (d.multiple_roots) leg.warnings.emplace_back("multiple_roots");
}

LegReport equity_leg(const ModelParams& p, bool verbose) {
    LegReport leg;
    leg.asset = "equity";
    try {
        if (p.risk_aversion == 0.0) {
            const EquitySolution s = solve_equity_rn(p);
            leg.fields = {{"price", s.price},
                          {"share_sold", s.share_sold},
                          {"required_return", s.required_return},
                          {"payoff", s.payoff},
                          {"consumption_early", s.consumption_early},
                          {"consumption_late", s.consumption_late}};
            if (s.negative_profit) leg.warnings.emplace_back("negative_profit");
        } else {
            const CrraEquitySolution s = solve_equity_crra(p);
            leg.fields = {{"price", s.price},
                          {"share_sold", s.share_sold},
                          {"required_return", s.required_return},
                          {"payoff", s.payoff},
                          {"consumption_early", s.consumption_early},
                          {"consumption_late", s.consumption_late},
                          {"risk_premium_factor", s.risk_premium_factor}};
            if (verbose) add_diagnostics(leg, s.diagnostics);
            else if (s.diagnostics.multiple_roots) leg.warnings.emplace_back("multiple_roots");
        }
        leg.ok = true;
    } catch (const ModelError& e) {
        leg.error = e.what();
    }
    return leg;
}

LegReport token_leg(const ModelParams& p, bool verbose) {
    LegReport leg;
    leg.asset = "token";
    try {
        if (p.risk_aversion == 0.0) {
            const TokenSolution s = solve_token_rn(p);
            leg.fields = {{"price", s.price},
                          {"tokens_sold", s.tokens_sold},
                          {"required_return", s.required_return},
                          {"payoff", s.payoff},
                          {"issuance_t1", s.issuance_t1},
                          {"issuance_t2", s.issuance_t2},
                          {"consumption_early", s.consumption_early},
                          {"consumption_late", s.consumption_late}};
            if (s.negative_issuance) leg.warnings.emplace_back("negative_issuance");
            if (s.negative_profit) leg.warnings.emplace_back("negative_profit");
        } else {
            const CrraTokenSolution s = solve_token_crra(p);
            leg.fields = {{"price", s.price},
                          {"tokens_sold", s.tokens_sold},
                          {"required_return", s.required_return},
                          {"payoff", s.payoff},
                          {"consumption_early", s.consumption_early},
                          {"consumption_late", s.consumption_late},
                          {"smoothing_ratio", s.smoothing_ratio}};
            if (verbose) add_diagnostics(leg, s.diagnostics);
            else if (s.diagnostics.multiple_roots) leg.warnings.emplace_back("multiple_roots");
        }
        leg.ok = true;
    } catch (const ModelError& e) {
        leg.error = e.what();
    }
    return leg;
}

std::string join(const std::vector<std::string>& items, char sep) {
    std::string out;
    for (const std::string& s : items) {
        if (!out.empty()) out += sep;
        out += s;
    }
    return out;
}

void write_solve(std::ostream& out, const CliCommand& cmd, const std::vector<LegReport>& legs) {
    if (cmd.format == OutputFormat::Csv) {
        out << "asset,field,value,flags\n";
        for (const LegReport& leg : legs) {
            if (!leg.ok) {
                out << leg.asset << ",error,," << leg.error << '\n';
                continue;
            }
            for (const auto& [name, value] : leg.fields)
                out << leg.asset << ',' << name << ',' << format_number(value, cmd.verbose) << ','
                    << join(leg.warnings, ';') << '\n';
        }
        return;
    }
    for (const LegReport& leg : legs) {
        out << "[" << leg.asset << "]\n";
        if (!leg.ok) {
            out << "  error = " << leg.error << '\n';
            continue;
        }
        for (const auto& [name, value] : leg.fields)
            out << "  " << name << " = " << format_number(value, cmd.verbose) << '\n';
        if (!leg.warnings.empty()) out << "  warnings = " << join(leg.warnings, ',') << '\n';
    }
}

class OutputTarget {
public:
    OutputTarget(const std::optional<std::string>& path, std::ostream& fallback) {
        if (path) {
            file_.open(*path);
            if (!file_) throw ModelError(ErrorKind::Parse, "cannot write " + *path);
        }
        stream_ = path ? static_cast<std::ostream*>(&file_) : &fallback;
    }
    std::ostream& stream() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

} // namespace

CliCommand parse_command_line(int argc, const char* const* argv, std::string* help_text) {
    CliCommand cmd;
    CLI::App app{"Token vs equity startup-financing equilibrium solver"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    std::map<std::string, double> flag_values;
    std::string format = "text";
    std::string param = "lambda";

    auto add_common = [&](CLI::App* sub) {
        for (const char* key : kParamKeys)
            sub->add_option(std::string("--") + key, flag_values[key],
                            std::string("Override parameter ") + key);
        sub->add_option("-c,--config", cmd.config_path, "Flat key=value parameter file");
        sub->add_option("-o,--output", cmd.output_path, "Write results here instead of stdout");
        sub->add_flag("-v,--verbose", cmd.verbose, "Full precision and solver diagnostics");
    };

    CLI::App* solve = app.add_subcommand("solve", "Solve both financing modes at one point");
    add_common(solve);
    solve->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv"}));

    CLI::App* sweep = app.add_subcommand("sweep", "Comparative statics over one parameter (CSV)");
    add_common(sweep);
    sweep->add_option("--param", param, "Parameter to sweep")
        ->check(CLI::IsMember({"lambda", "phi1", "phi2", "sigma", "R", "I", "W", "y1", "y2",
                               "omega"}));
    sweep->add_option("--lo", cmd.grid.lo, "Grid start");
    sweep->add_option("--hi", cmd.grid.hi, "Grid end");
    sweep->add_option("--steps", cmd.grid.steps, "Grid points, endpoints included");

    CLI::App* figure = app.add_subcommand("figure", "Payoff vs sigma at lambda=0.1 (CSV + SVG)");
    add_common(figure);
    figure->add_option("--svg", cmd.svg_path, "SVG chart path (default: figure1.svg)");

    CLI::App* verify = app.add_subcommand("verify", "Run the oracle and property checks");
    add_common(verify);
    verify->add_option("--oracle-grid", cmd.oracle_grid_points,
                       "Grid points for the brute-force demand search")
        ->check(CLI::Range(3, 10000001));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        if (help_text) *help_text = app.help();
        throw ModelError(ErrorKind::Parse, "help requested");
    } catch (const CLI::CallForAllHelp&) {
        if (help_text) *help_text = app.help("", CLI::AppFormatMode::All);
        throw ModelError(ErrorKind::Parse, "help requested");
    } catch (const CLI::ParseError& e) {
        throw ModelError(ErrorKind::Parse, e.what());
    }

    CLI::App* chosen = app.get_subcommands().front();
    if (chosen == solve) cmd.subcommand = Subcommand::Solve;
    else if (chosen == sweep) cmd.subcommand = Subcommand::Sweep;
    else if (chosen == figure) cmd.subcommand = Subcommand::Figure;
    else cmd.subcommand = Subcommand::Verify;

    for (const char* key : kParamKeys)
        if (chosen->count(std::string("--") + key) > 0) cmd.overrides[key] = flag_values[key];
    cmd.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Text;
    cmd.grid.param = *parse_param_name(param);
    return cmd;
}

int run(const CliCommand& command, std::ostream& out, std::ostream& err) {
    ModelParams params;
    try {
        if (command.config_path) apply_overrides(params, parse_config(*command.config_path));
        apply_overrides(params, command.overrides);
        validate_params(params);
    } catch (const ModelError& e) {
        err << e.what() << '\n';
        return kExitUsage;
    }

    try {
        switch (command.subcommand) {
        case Subcommand::Solve: {
            const std::vector<LegReport> legs{equity_leg(params, command.verbose),
                                              token_leg(params, command.verbose)};
            OutputTarget target(command.output_path, out);
            write_solve(target.stream(), command, legs);
            bool ok = true;
            for (const LegReport& leg : legs) {
                if (!leg.ok) {
                    err << leg.asset << ": " << leg.error << '\n';
                    ok = false;
                }
            }
            return ok ? kExitOk : kExitSolverError;
        }
        case Subcommand::Sweep: {
            const std::vector<SweepRow> rows = sweep_1d(params, command.grid);
            OutputTarget target(command.output_path, out);
            write_sweep_csv(target.stream(), rows, command.verbose);
            return kExitOk;
        }
        case Subcommand::Figure: {
            const std::vector<SweepRow> rows = figure1_data(params, figure1_grid());
            {
                OutputTarget target(command.output_path, out);
                write_sweep_csv(target.stream(), rows, command.verbose);
            }
            const std::string svg_path = command.svg_path.value_or("figure1.svg");
            std::ofstream svg(svg_path);
            if (!svg) {
                err << "cannot write " << svg_path << '\n';
                return kExitUsage;
            }
            write_figure_svg(svg, rows);
            return kExitOk;
        }
        case Subcommand::Verify: {
            VerifyOptions options;
            options.oracle_grid_points = command.oracle_grid_points;
            const std::vector<CheckResult> checks = run_verification(params, options);
            OutputTarget target(command.output_path, out);
            std::ostream& s = target.stream();
            bool all = true;
            for (const CheckResult& c : checks) {
                s << fmt::format("{:<4} {:<56} {}\n", c.skipped ? "SKIP" : c.passed ? "PASS" : "FAIL",
                               c.name, c.detail);
                all = all && c.passed;
            }
            s << (all ? "all checks passed\n" : "verification FAILED\n");
            return all ? kExitOk : kExitVerifyFailed;
        }
        }
    } catch (const ModelError& e) {
        err << e.what() << '\n';
        return e.kind() == ErrorKind::Parse || e.kind() == ErrorKind::Domain ? kExitUsage
                                                                            : kExitSolverError;
    }
    return kExitUsage;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CliCommand cmd;
    try {
        std::string help;
        try {
            cmd = parse_command_line(argc, argv, &help);
        } catch (const ModelError&) {
            if (!help.empty()) {
                out << help;
                return kExitOk;
            }
            throw;
        }
    } catch (const ModelError& e) {
        err << e.detail() << '\n';
        return kExitUsage;
    }
    return run(cmd, out, err);
}

} // namespace tokenfin
