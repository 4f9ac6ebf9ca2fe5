#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace friable {

enum class ErrorKind {
    NotAPrimePower,
    NonPrimeField,
    BudgetExceeded,
    OutOfTabulatedRange,
    DomainError,
    DivergenceRisk,
    MissingData,
    MissingColumn,
    InvalidArgument,
    InternalAssertion,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::NotAPrimePower: return "NotAPrimePower";
    case ErrorKind::NonPrimeField: return "NonPrimeField";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::OutOfTabulatedRange: return "OutOfTabulatedRange";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DivergenceRisk: return "DivergenceRisk";
    case ErrorKind::MissingData: return "MissingData";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InternalAssertion: return "InternalAssertion";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

/// Internal invariant check; unlike assert() it stays on in release builds.
inline void ensure(bool condition, const char* what) {
    if (!condition) fail(ErrorKind::InternalAssertion, what);
}

} // namespace friable
