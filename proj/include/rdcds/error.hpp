#pragma once

#include <stdexcept>
#include <string>

namespace rdcds {

enum class ErrorCode {
    ZeroInverse,
    SingularMatrix,
    DivideByZero,
    InvalidParams,
    InvalidSecurity,
    TooManyDropouts,
    ThresholdViolated,
    ShapeMismatch,
    FieldTooSmall,
    Infeasible,
    ScenarioInvalid,
    ConfigParse,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::ZeroInverse: return "ZeroInverse";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::DivideByZero: return "DivideByZero";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidSecurity: return "InvalidSecurity";
    case ErrorCode::TooManyDropouts: return "TooManyDropouts";
    case ErrorCode::ThresholdViolated: return "ThresholdViolated";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::FieldTooSmall: return "FieldTooSmall";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::ScenarioInvalid: return "ScenarioInvalid";
    case ErrorCode::ConfigParse: return "ConfigParse";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised when fewer servers are available than the update threshold demands.
class ThresholdViolated : public Error {
public:
    ThresholdViolated(int required, int available)
        : Error(ErrorCode::ThresholdViolated,
                "update needs " + std::to_string(required) + " available servers, have " +
                    std::to_string(available)),
          required_(required), available_(available) {}

    int required() const noexcept { return required_; }
    int available() const noexcept { return available_; }

private:
    int required_;
    int available_;
};

/// Scenario validation failure, pinned to the offending timeline entry (-1 for the header).
class ScenarioInvalid : public Error {
public:
    ScenarioInvalid(int event_index, const std::string& reason)
        : Error(ErrorCode::ScenarioInvalid, "event " + std::to_string(event_index) + ": " + reason),
          event_index_(event_index), reason_(reason) {}

    int event_index() const noexcept { return event_index_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    int event_index_;
    std::string reason_;
};

} // namespace rdcds
