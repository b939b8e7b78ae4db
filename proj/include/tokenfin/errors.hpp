#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tokenfin {

enum class ErrorKind {
    Domain,             // parameter or argument outside its admissible range
    CannotFinance,      // equity cannot raise I
    Degenerate,         // formula undefined at this corner (e.g. lambda = 1)
    IlliquidToken,      // token price is zero
    NoEquilibrium,      // fixed-point residual has no sign change on the bracket
    ConvergenceFailure, // root finder hit its iteration cap
    Bracket,            // oracle bracket does not straddle market clearing
    Parse,              // malformed config or command line
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::CannotFinance: return "CannotFinance";
    case ErrorKind::Degenerate: return "DegenerateCase";
    case ErrorKind::IlliquidToken: return "IlliquidToken";
    case ErrorKind::NoEquilibrium: return "NoEquilibrium";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::Bracket: return "BracketError";
    case ErrorKind::Parse: return "ParseError";
    }
    return "Unknown";
}

class ModelError : public std::runtime_error {
public:
    ModelError(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what),
          kind_(kind), detail_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// Message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

} // namespace tokenfin
