#include "tvf/candidates/candidates.hpp"

#include <algorithm>
#include <random>

#include "tvf/core/text.hpp"
#include "tvf/error.hpp"
#include "tvf/util/random.hpp"

namespace tvf::candidates {

std::optional<MisalignmentType> category_for(PartOfSpeech pos) noexcept {
    switch (pos) {
        case PartOfSpeech::noun:        return MisalignmentType::object;
        case PartOfSpeech::adjective:   return MisalignmentType::attribute;
        case PartOfSpeech::verb:        return MisalignmentType::action;
        case PartOfSpeech::preposition: return MisalignmentType::relation;
        case PartOfSpeech::other:       return std::nullopt;
    }
    return std::nullopt;
}

CandidateMap extract_candidates(std::string_view caption, const std::vector<TaggedToken>& tokens,
                                const Lexicon& lexicon) {
    CandidateMap out;
    for (auto t : kAllMisalignmentTypes) out[t];

    std::size_t longest_relation = 1;
    for (const auto& r : lexicon.relations) longest_relation = std::max(longest_relation, r.size());

    std::vector<std::string> lowered;
    lowered.reserve(tokens.size());
    for (const auto& t : tokens) lowered.push_back(text::to_lower(t.text));

    std::size_t i = 0;
    while (i < tokens.size()) {
        // Longest multi-word relation starting here wins.
        std::size_t matched = 0;
        for (std::size_t len = std::min(longest_relation, tokens.size() - i); len >= 2; --len) {
            std::vector<std::string> window(lowered.begin() + static_cast<std::ptrdiff_t>(i),
                                            lowered.begin() + static_cast<std::ptrdiff_t>(i + len));
            if (lexicon.is_relation(window)) {
                matched = len;
                break;
            }
        }
        if (matched > 0) {
            const std::size_t b = tokens[i].char_start;
            const std::size_t e = tokens[i + matched - 1].char_end;
            out[MisalignmentType::relation].push_back(
                {MisalignmentType::relation, b, e, std::string(caption.substr(b, e - b))});
            i += matched;
            continue;
        }

        const auto& tok = tokens[i];
        const auto cat = category_for(tok.pos);
        const bool stop = lexicon.stop_words.count(lowered[i]) > 0;
        if (cat && !stop) {
            const bool keep = *cat != MisalignmentType::relation || lexicon.is_relation({lowered[i]});
            if (keep) {
                out[*cat].push_back({*cat, tok.char_start, tok.char_end,
                                     std::string(caption.substr(tok.char_start, tok.char_end - tok.char_start))});
            }
        }
        ++i;
    }
    return out;
}

MisalignmentCandidate sample_candidate(const CandidateMap& cands, std::uint64_t rng_seed) {
    std::vector<const std::vector<MisalignmentCandidate>*> non_empty;
    for (auto t : kAllMisalignmentTypes) {
        auto it = cands.find(t);
        if (it != cands.end() && !it->second.empty()) non_empty.push_back(&it->second);
    }
    if (non_empty.empty()) fail(ErrorCode::NoCandidates, "caption has no misalignment candidates");

    std::mt19937_64 rng(rng_seed);
    const auto& bucket = *non_empty[util::uniform_index(rng, non_empty.size())];
    const auto& chosen = bucket[util::uniform_index(rng, bucket.size())];

    const std::string key = text::to_lower(chosen.surface);
    for (const auto& c : bucket) {
        if (text::to_lower(c.surface) == key) return c.char_start < chosen.char_start ? c : chosen;
    }
    return chosen;
}

std::size_t select_positive_caption_index(const std::vector<std::string>& captions) {
    if (captions.empty()) fail(ErrorCode::EmptyList, "no captions to select from");
    std::size_t best = 0;
    std::size_t best_len = text::utf8_length(captions[0]);
    for (std::size_t i = 1; i < captions.size(); ++i) {
        const std::size_t len = text::utf8_length(captions[i]);
        if (len > best_len) {
            best = i;
            best_len = len;
        }
    }
    return best;
}

std::string select_positive_caption(const std::vector<std::string>& captions) {
    return captions[select_positive_caption_index(captions)];
}

} // namespace tvf::candidates
