#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace heightlab {

enum class ErrorCode {
    quotient_too_small,
    quotient_breaks_parity,
    no_witness_face,
    not_bipartite,
    not_excited,
    infeasible,
    too_large,
    stuck_site,
    invalid_window,
    gap_too_large,
    inconsistent_boundary,
    parity_violation,
    invalid_argument,
    fixture_missing,
    config_error,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::quotient_too_small: return "QuotientTooSmall";
    case ErrorCode::quotient_breaks_parity: return "QuotientBreaksParity";
    case ErrorCode::no_witness_face: return "NoWitnessFace";
    case ErrorCode::not_bipartite: return "NotBipartite";
    case ErrorCode::not_excited: return "NotExcited";
    case ErrorCode::infeasible: return "Infeasible";
    case ErrorCode::too_large: return "TooLarge";
    case ErrorCode::stuck_site: return "StuckSite";
    case ErrorCode::invalid_window: return "InvalidWindow";
    case ErrorCode::gap_too_large: return "GapTooLarge";
    case ErrorCode::inconsistent_boundary: return "InconsistentBoundary";
    case ErrorCode::parity_violation: return "ParityViolation";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::fixture_missing: return "FixtureMissing";
    case ErrorCode::config_error: return "ConfigError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

} // namespace heightlab
