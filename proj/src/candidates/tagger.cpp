#include "tvf/candidates/tagger.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "tvf/core/text.hpp"
#include "tvf/error.hpp"
#include "tvf/util/embedded_data.hpp"

namespace tvf::candidates {

namespace {

bool is_word_byte(unsigned char c) noexcept {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '\'' || c == '-' || c >= 0x80;
}

bool is_space(unsigned char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool has_alpha(std::string_view w) noexcept {
    for (unsigned char c : w) {
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80) return true;
    }
    return false;
}

bool ends_with(std::string_view w, std::string_view suffix) noexcept {
    return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

std::unordered_set<std::string> to_set(const std::vector<std::string>& words) {
    return {words.begin(), words.end()};
}

Lexicon from_contents(const std::function<std::string(const std::string&)>& read) {
    Lexicon lex;
    lex.stop_words = to_set(parse_word_list(read("stop.txt")));
    lex.prepositions = to_set(parse_word_list(read("prepositions.txt")));
    lex.adjectives = to_set(parse_word_list(read("adjectives.txt")));
    lex.verbs = to_set(parse_word_list(read("verbs.txt")));
    lex.nouns = to_set(parse_word_list(read("nouns.txt")));
    for (const auto& entry : parse_word_list(read("relations.txt"))) {
        std::vector<std::string> words;
        for (auto w : text::split(entry, " ")) {
            if (!w.empty()) words.emplace_back(w);
        }
        lex.relations.push_back(std::move(words));
    }
    return lex;
}

} // namespace

std::vector<std::string> parse_word_list(std::string_view content) {
    std::vector<std::string> out;
    for (auto line : text::split(content, "\n")) {
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        out.push_back(text::to_lower(text::collapse_whitespace(t)));
    }
    return out;
}

Lexicon Lexicon::load(const std::filesystem::path& dir) {
    return from_contents([&](const std::string& name) {
        std::ifstream in(dir / name);
        if (!in) fail(ErrorCode::ConfigError, "cannot read lexicon file " + (dir / name).string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    });
}

const Lexicon& Lexicon::builtin() {
    static const Lexicon lex = from_contents([](const std::string& name) {
        auto content = embedded::find("lexicon/" + name);
        if (!content) fail(ErrorCode::ConfigError, "missing built-in lexicon " + name);
        return std::string(*content);
    });
    return lex;
}

bool Lexicon::is_relation(const std::vector<std::string>& words) const {
    for (const auto& r : relations) {
        if (r == words) return true;
    }
    return false;
}

std::vector<TaggedToken> tokenize(std::string_view caption) {
    std::vector<TaggedToken> tokens;
    std::size_t i = 0;
    while (i < caption.size()) {
        const auto c = static_cast<unsigned char>(caption[i]);
        if (is_space(c)) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        if (is_word_byte(c)) {
            while (j < caption.size() && is_word_byte(static_cast<unsigned char>(caption[j]))) ++j;
        }
        tokens.push_back(TaggedToken{std::string(caption.substr(i, j - i)), PartOfSpeech::other, i, j});
        i = j;
    }
    return tokens;
}

PartOfSpeech LexiconTagger::tag_word(std::string_view word) const {
    if (!has_alpha(word)) return PartOfSpeech::other;
    const std::string w = text::to_lower(word);
    if (lexicon_.stop_words.count(w)) return PartOfSpeech::other;
    if (lexicon_.prepositions.count(w)) return PartOfSpeech::preposition;
    if (lexicon_.adjectives.count(w)) return PartOfSpeech::adjective;
    if (lexicon_.verbs.count(w)) return PartOfSpeech::verb;
    if (lexicon_.nouns.count(w)) return PartOfSpeech::noun;
    if (w.size() > 4 && ends_with(w, "ing")) return PartOfSpeech::verb;
    if (w.size() > 3 && ends_with(w, "ed")) return PartOfSpeech::verb;
    for (std::string_view suffix : {"ous", "ful", "ish", "less", "ive"}) {
        if (w.size() > suffix.size() + 2 && ends_with(w, suffix)) return PartOfSpeech::adjective;
    }
    if (w.size() > 3 && ends_with(w, "ly")) return PartOfSpeech::other;
    return PartOfSpeech::noun;
}

std::vector<TaggedToken> LexiconTagger::tag(std::string_view caption) {
    auto tokens = tokenize(caption);
    for (auto& t : tokens) t.pos = tag_word(t.text);
    return tokens;
}

std::vector<TaggedToken> tag_caption(std::string_view caption, TaggerBackend& tagger) {
    require(!text::is_blank(caption), "caption must be non-empty");
    auto tokens = tagger.tag(caption);
    std::size_t prev_end = 0;
    for (const auto& t : tokens) {
        if (t.char_start < prev_end || t.char_end <= t.char_start || t.char_end > caption.size() ||
            caption.substr(t.char_start, t.char_end - t.char_start) != t.text) {
            fail(ErrorCode::SchemaError, "tagger returned a token that does not slice the caption: '" +
                                             t.text + "'");
        }
        prev_end = t.char_end;
    }
    return tokens;
}

} // namespace tvf::candidates
