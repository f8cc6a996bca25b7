#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tvf/candidates/candidates.hpp"
#include "tvf/clients/backends.hpp"
#include "tvf/core/types.hpp"
#include "tvf/genpipe/templates.hpp"

namespace tvf::genpipe {

// The MISALIGNMENT line split into its parts.
struct MisalignmentLine {
    std::string feedback;           // line with every parenthetical removed
    std::string caption_cue;        // first "(CAPTION: ...)"
    std::string contradiction_cue;  // first "(CONTRADICTION: ...)"

    bool operator==(const MisalignmentLine&) const = default;
};

/// Throws MissingCue naming the absent side, MissingKey if the feedback is empty.
[[nodiscard]] MisalignmentLine parse_misalignment_line(std::string_view line);

/// Reads the CONTRADICTION:, MISALIGNMENT: and MISALIGNMENT TYPE: lines (keys are
/// case-sensitive, first occurrence wins, echoed CAPTION: lines are skipped).
/// Throws MissingKey, MissingCue or UnknownType.
[[nodiscard]] GenerationRecord parse_generation(std::string_view raw);

/// Value of the first line starting with `key`, trimmed. nullopt when absent.
[[nodiscard]] std::optional<std::string> keyed_line(std::string_view raw, std::string_view key);

struct GenerationOptions {
    DecodingParams decoding{};
    int retries = 2;  // extra attempts after a parse failure
    const TemplateRegistry* templates = nullptr;  // builtin() when null
};

/// Builds the (dataset, category) prompt, calls the LLM and parses the answer.
/// Parse failures (including a contradiction equal to the caption, or a field
/// containing '|') are retried with the same prompt; once the budget is spent
/// the last one is rethrown as ParseFailed. A type line naming another
/// category throws CategoryMismatch without retrying.
[[nodiscard]] GenerationRecord generate_misalignment(const AlignedPair& pair,
                                                     const candidates::MisalignmentCandidate& cand,
                                                     LlmBackend& llm, const GenerationOptions& options = {});

/// Rewrites a localized narrative into a caption: the text after the last
/// "CAPTION:" key of the answer. Throws MissingKey.
[[nodiscard]] std::string summarize_narrative(std::string_view narrative, LlmBackend& llm,
                                              const GenerationOptions& options = {});

/// Merges 1-3 rater feedbacks (absent ones as nullopt) into one misalignment.
/// Throws InvalidArgument when no feedback is present, else as parse_misalignment_line.
[[nodiscard]] MisalignmentLine merge_human_feedbacks(std::string_view caption,
                                                     const std::vector<std::optional<std::string>>& feedbacks,
                                                     LlmBackend& llm, const GenerationOptions& options = {});

} // namespace tvf::genpipe
