#pragma once

#include <stdexcept>
#include <string>

namespace perisys {

enum class ErrorCode {
    InvalidArgument,
    NegativeState,
    InfeasibleCoercivity,
    RegimeMismatch,
    PreconditionViolated,
    InadmissibleS,
    NonpositiveTheta,
    LinearSolveFailed,
    StabilityViolation,
    MaxIterations,
    DivergenceDetected,
    ConfigError,
    IoError,
};

inline const char* to_string(ErrorCode c)
{
    switch (c) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NegativeState: return "NegativeState";
    case ErrorCode::InfeasibleCoercivity: return "InfeasibleCoercivity";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::InadmissibleS: return "InadmissibleS";
    case ErrorCode::NonpositiveTheta: return "NonpositiveTheta";
    case ErrorCode::LinearSolveFailed: return "LinearSolveFailed";
    case ErrorCode::StabilityViolation: return "StabilityViolation";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::DivergenceDetected: return "DivergenceDetected";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void expect(bool cond, ErrorCode code, const std::string& what)
{
    if (!cond)
        throw Error(code, what);
}

} // namespace perisys
