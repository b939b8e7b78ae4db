#pragma once

#include "tokenfin/model.hpp"
#include "tokenfin/sweep.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tokenfin {

enum class Subcommand { Solve, Sweep, Figure, Verify };
enum class OutputFormat { Csv, Text };

enum ExitCode : int {
    kExitOk = 0,
    kExitSolverError = 1,
    kExitVerifyFailed = 2,
    kExitUsage = 3,
};

struct CliCommand {
    Subcommand subcommand = Subcommand::Solve;
    std::map<std::string, double> overrides; // flag values, applied after the config file
    std::optional<std::string> config_path;
    std::optional<std::string> output_path;
    std::optional<std::string> svg_path;     // figure only
    OutputFormat format = OutputFormat::Text;
    bool verbose = false;
    GridSpec grid = {SweepParam::Lambda, 0.0, 0.5, 11}; // sweep only
    int oracle_grid_points = 10001;                     // verify only
};

/// Parses argv into a command. Throws ModelError(Parse) on bad usage; the
/// help text request is reported through `help_text`.
CliCommand parse_command_line(int argc, const char* const* argv, std::string* help_text = nullptr);

/// Executes a command, writing results to `out` (or the output file) and
/// diagnostics to `err`. Returns an ExitCode.
int run(const CliCommand& command, std::ostream& out, std::ostream& err);

/// parse_command_line + run, mapping parse failures to kExitUsage.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace tokenfin
