#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tvf {

enum class ErrorCode {
    InvalidArgument,
    OutOfRange,
    Degenerate,
    SeparatorInField,
    MalformedSeparators,
    MalformedBox,
    BackendUnavailable,
    Timeout,
    RateLimited,
    NoDetection,
    ParseFailed,
    CategoryMismatch,
    MissingKey,
    MissingCue,
    UnknownType,
    UnknownTemplate,
    NoCandidates,
    EmptyList,
    EmptyInput,
    LengthMismatch,
    MissingInstance,
    UnknownRater,
    UnknownInstance,
    SchemaError,
    ConfigError,
};

[[nodiscard]] std::string_view error_code_name(ErrorCode code) noexcept;

// Every failure surfaced by the library is an Error carrying one of the codes
// above; `line()` is set for SchemaError raised while reading line-oriented files.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, long line = 0);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] long line() const noexcept { return line_; }

private:
    ErrorCode code_;
    long line_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, std::string_view what) {
    if (!condition) {
        fail(ErrorCode::InvalidArgument, std::string(what));
    }
}

} // namespace tvf
