#include "runcount/error.hpp"

namespace runcount {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::EmptySample: return "EmptySample";
        case ErrorKind::SampleTooSmall: return "SampleTooSmall";
        case ErrorKind::QOutOfRange: return "QOutOfRange";
        case ErrorKind::NonFiniteValue: return "NonFiniteValue";
        case ErrorKind::BadParameters: return "BadParameters";
        case ErrorKind::AlreadyStopped: return "AlreadyStopped";
        case ErrorKind::BadConfig: return "BadConfig";
        case ErrorKind::BadBudget: return "BadBudget";
        case ErrorKind::BadDimension: return "BadDimension";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::SchemaError: return "SchemaError";
        case ErrorKind::InsufficientRuns: return "InsufficientRuns";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace runcount
