#include "tvf/genpipe/generation.hpp"

#include "tvf/core/text.hpp"
#include "tvf/error.hpp"

namespace tvf::genpipe {

namespace {

constexpr std::string_view kCaptionKey = "CAPTION:";
constexpr std::string_view kContradictionKey = "CONTRADICTION:";
constexpr std::string_view kMisalignmentKey = "MISALIGNMENT:";
constexpr std::string_view kTypeKey = "MISALIGNMENT TYPE:";

std::string_view strip_cr(std::string_view line) {
    while (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

const TemplateRegistry& registry(const GenerationOptions& o) {
    return o.templates != nullptr ? *o.templates : TemplateRegistry::builtin();
}

bool is_retryable(ErrorCode c) {
    return c == ErrorCode::MissingKey || c == ErrorCode::MissingCue || c == ErrorCode::UnknownType ||
           c == ErrorCode::ParseFailed;
}

bool has_pipe(const GenerationRecord& r) {
    for (const std::string* s : {&r.contradiction_caption, &r.feedback, &r.caption_cue, &r.contradiction_cue}) {
        if (s->find('|') != std::string::npos) return true;
    }
    return false;
}

} // namespace

std::optional<std::string> keyed_line(std::string_view raw, std::string_view key) {
    for (auto line : text::split(raw, "\n")) {
        const auto t = text::trim(strip_cr(line));
        if (text::starts_with(t, key)) return std::string(text::trim(t.substr(key.size())));
    }
    return std::nullopt;
}

MisalignmentLine parse_misalignment_line(std::string_view line) {
    MisalignmentLine out;
    std::optional<std::string> caption_cue;
    std::optional<std::string> contradiction_cue;
    std::string kept;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] != '(') {
            kept.push_back(line[i++]);
            continue;
        }
        // Find the matching close paren, honouring nesting.
        int depth = 0;
        std::size_t j = i;
        for (; j < line.size(); ++j) {
            if (line[j] == '(') ++depth;
            else if (line[j] == ')' && --depth == 0) break;
        }
        if (j >= line.size()) {  // unbalanced: keep the rest verbatim
            kept.append(line.substr(i));
            break;
        }
        const auto inner = text::trim(line.substr(i + 1, j - i - 1));
        if (!caption_cue && text::starts_with(inner, kCaptionKey)) {
            caption_cue = std::string(text::trim(inner.substr(kCaptionKey.size())));
        } else if (!contradiction_cue && text::starts_with(inner, kContradictionKey)) {
            contradiction_cue = std::string(text::trim(inner.substr(kContradictionKey.size())));
        }
        while (!kept.empty() && (kept.back() == ' ' || kept.back() == '\t')) kept.pop_back();
        i = j + 1;
    }
    if (!caption_cue || caption_cue->empty()) fail(ErrorCode::MissingCue, "MISALIGNMENT lacks a (CAPTION: ...) cue");
    if (!contradiction_cue || contradiction_cue->empty()) {
        fail(ErrorCode::MissingCue, "MISALIGNMENT lacks a (CONTRADICTION: ...) cue");
    }
    out.feedback = text::collapse_whitespace(kept);
    if (out.feedback.empty()) fail(ErrorCode::MissingKey, "MISALIGNMENT has no feedback text");
    out.caption_cue = std::move(*caption_cue);
    out.contradiction_cue = std::move(*contradiction_cue);
    return out;
}

GenerationRecord parse_generation(std::string_view raw) {
    std::optional<std::string> contradiction;
    std::optional<std::string> misalignment;
    std::optional<std::string> type;
    for (auto line : text::split(raw, "\n")) {
        const auto t = text::trim(strip_cr(line));
        if (text::starts_with(t, kCaptionKey)) continue;  // echoed input
        auto take = [&](std::optional<std::string>& slot, std::string_view key) {
            if (!slot) slot = std::string(text::trim(t.substr(key.size())));
        };
        if (text::starts_with(t, kTypeKey)) take(type, kTypeKey);
        else if (text::starts_with(t, kMisalignmentKey)) take(misalignment, kMisalignmentKey);
        else if (text::starts_with(t, kContradictionKey)) take(contradiction, kContradictionKey);
    }
    if (!contradiction || contradiction->empty()) fail(ErrorCode::MissingKey, "missing CONTRADICTION");
    if (!misalignment || misalignment->empty()) fail(ErrorCode::MissingKey, "missing MISALIGNMENT");
    if (!type || type->empty()) fail(ErrorCode::MissingKey, "missing MISALIGNMENT TYPE");

    auto line = parse_misalignment_line(*misalignment);
    GenerationRecord rec;
    rec.contradiction_caption = std::move(*contradiction);
    rec.feedback = std::move(line.feedback);
    rec.caption_cue = std::move(line.caption_cue);
    rec.contradiction_cue = std::move(line.contradiction_cue);
    rec.misalignment_type = parse_misalignment_type(*type);
    rec.raw_llm_text = std::string(raw);
    return rec;
}

GenerationRecord generate_misalignment(const AlignedPair& pair, const candidates::MisalignmentCandidate& cand,
                                       LlmBackend& llm, const GenerationOptions& options) {
    require(options.retries >= 0, "retries must be >= 0");
    const auto& tmpl = registry(options).get(pair.source_dataset, cand.category);
    const std::string prompt = build_prompt(tmpl, pair.caption);
    const std::string original = text::normalize_sentence(pair.caption);

    std::string last_error;
    for (int attempt = 0; attempt <= options.retries; ++attempt) {
        const std::string raw = llm.complete_chat(prompt, options.decoding);
        try {
            GenerationRecord rec = parse_generation(raw);
            if (rec.misalignment_type != cand.category) {
                fail(ErrorCode::CategoryMismatch, "asked for " + std::string(to_string(cand.category)) + ", got " +
                                                      std::string(to_string(rec.misalignment_type)));
            }
            if (text::normalize_sentence(rec.contradiction_caption) == original) {
                fail(ErrorCode::ParseFailed, "contradiction repeats the caption");
            }
            if (has_pipe(rec)) fail(ErrorCode::ParseFailed, "generated field contains '|'");
            return rec;
        } catch (const Error& e) {
            if (!is_retryable(e.code())) throw;
            last_error = e.what();
        }
    }
    fail(ErrorCode::ParseFailed, "generation for " + pair.id + " failed after " +
                                     std::to_string(options.retries + 1) + " attempts: " + last_error);
}

std::string summarize_narrative(std::string_view narrative, LlmBackend& llm, const GenerationOptions& options) {
    require(!text::is_blank(narrative), "narrative must be non-empty");
    const auto& tmpl = registry(options).get(kNarrativeDataset, kSummarizeCategory);
    const std::string raw = llm.complete_chat(build_prompt(tmpl, text::collapse_whitespace(narrative)), options.decoding);
    std::optional<std::string> caption;
    for (auto line : text::split(raw, "\n")) {
        const auto t = text::trim(strip_cr(line));
        if (text::starts_with(t, kCaptionKey)) caption = std::string(text::trim(t.substr(kCaptionKey.size())));
    }
    if (!caption || caption->empty()) fail(ErrorCode::MissingKey, "summary lacks CAPTION");
    return *caption;
}

MisalignmentLine merge_human_feedbacks(std::string_view caption, const std::vector<std::optional<std::string>>& feedbacks,
                                       LlmBackend& llm, const GenerationOptions& options) {
    require(!text::is_blank(caption), "caption must be non-empty");
    require(!feedbacks.empty() && feedbacks.size() <= 3, "expected 1 to 3 feedbacks");
    std::vector<std::optional<std::string>> cleaned;
    bool any = false;
    for (const auto& f : feedbacks) {
        if (f && !text::is_blank(*f) && text::trim(*f) != "NaN") {
            cleaned.emplace_back(*f);
            any = true;
        } else {
            cleaned.emplace_back(std::nullopt);
        }
    }
    require(any, "at least one feedback must be present");
    const auto& tmpl = registry(options).get(kMergeDataset, kMergeCategory);
    const std::string prompt = build_prompt(tmpl, caption, {{"feedbacks", render_feedback_list(cleaned)}});
    const std::string raw = llm.complete_chat(prompt, options.decoding);
    std::optional<std::string> line;
    for (auto l : text::split(raw, "\n")) {
        const auto t = text::trim(strip_cr(l));
        if (text::starts_with(t, kTypeKey)) continue;
        if (text::starts_with(t, kMisalignmentKey)) {
            line = std::string(text::trim(t.substr(kMisalignmentKey.size())));
            break;
        }
    }
    if (!line || line->empty()) fail(ErrorCode::MissingKey, "missing MISALIGNMENT");
    return parse_misalignment_line(*line);
}

} // namespace tvf::genpipe
