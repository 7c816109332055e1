#pragma once

#include <stdexcept>
#include <string>

namespace schoice {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ValidationCode {
    CapacityShortfall,
    IncompletePreference,
    OverlappingTiers,
    IncompletePriority,
    UnknownId,
    DuplicateId,
    BadQuota,
    InvalidGroups,
    BadMatching,
    BadLottery,
    ParseError,
};

inline const char* to_string(ValidationCode code) {
    switch (code) {
    case ValidationCode::CapacityShortfall: return "CapacityShortfall";
    case ValidationCode::IncompletePreference: return "IncompletePreference";
    case ValidationCode::OverlappingTiers: return "OverlappingTiers";
    case ValidationCode::IncompletePriority: return "IncompletePriority";
    case ValidationCode::UnknownId: return "UnknownId";
    case ValidationCode::DuplicateId: return "DuplicateId";
    case ValidationCode::BadQuota: return "BadQuota";
    case ValidationCode::InvalidGroups: return "InvalidGroups";
    case ValidationCode::BadMatching: return "BadMatching";
    case ValidationCode::BadLottery: return "BadLottery";
    case ValidationCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Raised when external input fails an invariant; the message names the
/// offending entity.
class ValidationError : public Error {
public:
    ValidationError(ValidationCode code, const std::string& message)
        : Error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ValidationCode code() const { return code_; }

private:
    ValidationCode code_;
};

/// Raised when an operation requires a stable matching and gets an unstable one.
class MatchingUnstable : public Error {
public:
    using Error::Error;
};

/// Raised when an explicit-support reassignment would exceed the configured
/// permutation bound; marginal or sampling forms handle those instances.
class SupportTooLarge : public Error {
public:
    using Error::Error;
};

/// Raised by brute-force enumeration when an instance exceeds its budget.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

} // namespace schoice
