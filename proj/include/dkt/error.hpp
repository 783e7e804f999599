#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace dkt {

// Machine-readable error category. Every failure surfaced by the library
// carries one of these plus a human-readable message, so callers (the CLI
// in particular) can emit structured single-line error records.
enum class ErrorCode {
    DimensionMismatch,
    IndexOutOfRange,
    InvalidArgument,
    SequenceTooShort,
    Diverged,
    MissingColumn,
    ParseError,
    EmptyInput,
    FormatError,
    IoError,
    SingleClass,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::DimensionMismatch: return "dimension_mismatch";
        case ErrorCode::IndexOutOfRange:   return "index_out_of_range";
        case ErrorCode::InvalidArgument:   return "invalid_argument";
        case ErrorCode::SequenceTooShort:  return "sequence_too_short";
        case ErrorCode::Diverged:          return "diverged";
        case ErrorCode::MissingColumn:     return "missing_column";
        case ErrorCode::ParseError:        return "parse_error";
        case ErrorCode::EmptyInput:        return "empty_input";
        case ErrorCode::FormatError:       return "format_error";
        case ErrorCode::IoError:           return "io_error";
        case ErrorCode::SingleClass:       return "single_class";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    const char* code_name() const noexcept { return error_code_name(code_); }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace dkt
