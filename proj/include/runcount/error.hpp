#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace runcount {

enum class ErrorKind {
    EmptySample,
    SampleTooSmall,
    QOutOfRange,
    NonFiniteValue,
    BadParameters,
    AlreadyStopped,
    BadConfig,
    BadBudget,
    BadDimension,
    DimensionMismatch,
    EmptyInput,
    ParseError,
    SchemaError,
    InsufficientRuns,
    IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

}  // namespace runcount
