#include "tvf/clients/backends.hpp"

#include "tvf/error.hpp"

namespace tvf {

std::string_view to_string(PartOfSpeech p) noexcept {
    switch (p) {
        case PartOfSpeech::noun:        return "noun";
        case PartOfSpeech::adjective:   return "adjective";
        case PartOfSpeech::verb:        return "verb";
        case PartOfSpeech::preposition: return "preposition";
        case PartOfSpeech::other:       return "other";
    }
    return "other";
}

PartOfSpeech parse_part_of_speech(std::string_view s) {
    if (s == "noun") return PartOfSpeech::noun;
    if (s == "adjective") return PartOfSpeech::adjective;
    if (s == "verb") return PartOfSpeech::verb;
    if (s == "preposition") return PartOfSpeech::preposition;
    if (s == "other") return PartOfSpeech::other;
    fail(ErrorCode::SchemaError, "unknown part of speech '" + std::string(s) + "'");
}

} // namespace tvf
