#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "tvf/clients/backends.hpp"

namespace tvf::candidates {

// Word lists driving the built-in tagger and the candidate extractor.
// Files are plain text, one entry per line, '#' starts a comment line.
struct Lexicon {
    std::unordered_set<std::string> stop_words;
    std::unordered_set<std::string> prepositions;
    std::unordered_set<std::string> adjectives;
    std::unordered_set<std::string> verbs;
    std::unordered_set<std::string> nouns;
    // Spatial relations; multi-word entries are stored token-split.
    std::vector<std::vector<std::string>> relations;

    /// Reads stop.txt, prepositions.txt, relations.txt, adjectives.txt,
    /// verbs.txt and nouns.txt from `dir`. Throws ConfigError on a missing file.
    static Lexicon load(const std::filesystem::path& dir);

    /// The lexicon compiled into the library from data/lexicon.
    static const Lexicon& builtin();

    [[nodiscard]] bool is_relation(const std::vector<std::string>& words) const;
};

[[nodiscard]] std::vector<std::string> parse_word_list(std::string_view content);

// Splits a caption into word tokens (runs of letters, digits, apostrophes,
// hyphens and non-ASCII bytes) and single-character punctuation tokens.
[[nodiscard]] std::vector<TaggedToken> tokenize(std::string_view caption);

// Lexicon lookups first (stop words, prepositions, adjectives, verbs, nouns),
// then suffix rules (-ing/-ed -> verb; -ous/-ful/-ish/-less/-ive -> adjective;
// -ly -> other), then noun as the fallback for alphabetic words.
class LexiconTagger final : public TaggerBackend {
public:
    explicit LexiconTagger(const Lexicon& lexicon = Lexicon::builtin()) : lexicon_(lexicon) {}

    std::vector<TaggedToken> tag(std::string_view caption) override;

    [[nodiscard]] PartOfSpeech tag_word(std::string_view word) const;

private:
    Lexicon lexicon_;
};

/// Runs the backend after checking the caption is non-blank (InvalidArgument).
[[nodiscard]] std::vector<TaggedToken> tag_caption(std::string_view caption, TaggerBackend& tagger);

} // namespace tvf::candidates
