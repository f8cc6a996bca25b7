#include "tvf/error.hpp"

namespace tvf {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument:     return "InvalidArgument";
        case ErrorCode::OutOfRange:          return "OutOfRange";
        case ErrorCode::Degenerate:          return "Degenerate";
        case ErrorCode::SeparatorInField:    return "SeparatorInField";
        case ErrorCode::MalformedSeparators: return "MalformedSeparators";
        case ErrorCode::MalformedBox:        return "MalformedBox";
        case ErrorCode::BackendUnavailable:  return "BackendUnavailable";
        case ErrorCode::Timeout:             return "Timeout";
        case ErrorCode::RateLimited:         return "RateLimited";
        case ErrorCode::NoDetection:         return "NoDetection";
        case ErrorCode::ParseFailed:         return "ParseFailed";
        case ErrorCode::CategoryMismatch:    return "CategoryMismatch";
        case ErrorCode::MissingKey:          return "MissingKey";
        case ErrorCode::MissingCue:          return "MissingCue";
        case ErrorCode::UnknownType:         return "UnknownType";
        case ErrorCode::UnknownTemplate:     return "UnknownTemplate";
        case ErrorCode::NoCandidates:        return "NoCandidates";
        case ErrorCode::EmptyList:           return "EmptyList";
        case ErrorCode::EmptyInput:          return "EmptyInput";
        case ErrorCode::LengthMismatch:      return "LengthMismatch";
        case ErrorCode::MissingInstance:     return "MissingInstance";
        case ErrorCode::UnknownRater:        return "UnknownRater";
        case ErrorCode::UnknownInstance:     return "UnknownInstance";
        case ErrorCode::SchemaError:         return "SchemaError";
        case ErrorCode::ConfigError:         return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, long line)
    : std::runtime_error(message), code_(code), line_(line) {}

void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace tvf
