#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tvf/candidates/tagger.hpp"
#include "tvf/core/types.hpp"

namespace tvf::candidates {

struct MisalignmentCandidate {
    MisalignmentType category = MisalignmentType::object;
    std::size_t char_start = 0;
    std::size_t char_end = 0;
    std::string surface;

    bool operator==(const MisalignmentCandidate&) const = default;
};

// Always holds all four categories, possibly with empty lists.
using CandidateMap = std::map<MisalignmentType, std::vector<MisalignmentCandidate>>;

/// Category a part of speech feeds; relation only applies to lexicon relations,
/// which the extractor handles itself.
[[nodiscard]] std::optional<MisalignmentType> category_for(PartOfSpeech pos) noexcept;

/// noun -> object, adjective -> attribute, verb -> action, preposition in the
/// relation lexicon -> relation (multi-word relations become one candidate).
/// Stop words never yield candidates.
[[nodiscard]] CandidateMap extract_candidates(std::string_view caption,
                                              const std::vector<TaggedToken>& tokens,
                                              const Lexicon& lexicon = Lexicon::builtin());

/// Uniform over the non-empty categories, then uniform within the chosen one.
/// When the chosen surface also occurs earlier in the caption, the earliest
/// span is returned. Throws NoCandidates when every category is empty.
[[nodiscard]] MisalignmentCandidate sample_candidate(const CandidateMap& cands, std::uint64_t rng_seed);

/// Longest caption by UTF-8 character count; ties go to the first. Throws EmptyList.
[[nodiscard]] std::string select_positive_caption(const std::vector<std::string>& captions);

/// Index variant of select_positive_caption.
[[nodiscard]] std::size_t select_positive_caption_index(const std::vector<std::string>& captions);

} // namespace tvf::candidates
