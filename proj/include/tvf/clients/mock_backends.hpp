#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tvf/clients/backends.hpp"

// Deterministic offline stand-ins for the model roles. Every answer is a pure
// function of the request and the fixture tables; all classes are read-only
// after construction and therefore safe to share between threads.
namespace tvf::clients {

[[nodiscard]] std::uint64_t fnv1a64(std::string_view s) noexcept;

/// 16 lowercase hex digits of fnv1a64(s); the key of llm.by_prompt_hash.
[[nodiscard]] std::string prompt_hash(std::string_view s);

// Fixture file layout:
// {
//   "llm": {"by_prompt_hash": {"<hex>": "text"}, "by_prompt": {"<prompt>": "text"},
//           "by_caption": [{"caption": "...", "kind": "relation", "response": "..."}]},
//   "nli": [{"premise": "...", "hypothesis": "...", "entailment": 0.5}],
//   "grounding": [{"image_uri": "...", "label": "...", "boxes": [{"x1":..,"y1":..,"x2":..,"y2":..,"confidence":..}]}],
//   "vlm": [{"image_uri": "...", "question": "...", "answer": "..."}]
// }
// Every section is optional. by_caption "kind" is a category name, "summarize",
// "merge", or absent (matches any prompt with that caption).
struct MockFixtures {
    std::map<std::string, std::string> llm_by_prompt_hash;
    std::map<std::string, std::string> llm_by_prompt;
    std::map<std::pair<std::string, std::string>, std::string> llm_by_caption;  // (caption, kind)
    std::map<std::pair<std::string, std::string>, double> nli;
    std::map<std::pair<std::string, std::string>, std::vector<PixelBox>> grounding;
    std::map<std::pair<std::string, std::string>, std::string> vlm;

    /// Throws SchemaError on a malformed table.
    static MockFixtures from_json(const nlohmann::json& j);
    /// Throws ConfigError when the file cannot be read.
    static MockFixtures load(const std::filesystem::path& path);

    /// Later tables override earlier entries with the same key.
    void merge(const MockFixtures& other);
};

// What a generation prompt asks for, recovered from its tail.
struct PromptKey {
    std::string kind;     // "object" .. "relation", "summarize", "merge", or "" if unknown
    std::string caption;  // caption / description the tail carries
    std::string label;    // category prompt label for misalignment prompts
    std::vector<std::string> feedbacks;  // merge prompts only, "NaN" entries dropped
};

[[nodiscard]] PromptKey inspect_prompt(std::string_view prompt);

// Lookup order: exact prompt, prompt hash, (caption, kind), (caption, any),
// then a fallback that always parses:
//   misalignment: "CONTRADICTION: {caption} in a different scene.\n"
//                 "MISALIGNMENT: The scene is as captioned (CAPTION: {caption}), not altered
//                  (CONTRADICTION: different scene)\nMISALIGNMENT TYPE: {label}"
//   summarize:    "CAPTION: {first sentence of the description}"
//   merge:        "MISALIGNMENT: {first feedback} (CAPTION: {caption}) (CONTRADICTION: {first feedback})"
//   otherwise:    "OK"
class MockLlm final : public LlmBackend {
public:
    explicit MockLlm(MockFixtures fixtures = {}) : fixtures_(std::move(fixtures)) {}
    std::string complete_chat(std::string_view prompt, const DecodingParams& params) override;

private:
    MockFixtures fixtures_;
};

// Fixture score if present; 1.0 when the normalized strings are equal;
// otherwise the Jaccard index of the lowercase alphanumeric token sets.
class MockNli final : public NliBackend {
public:
    explicit MockNli(MockFixtures fixtures = {}) : fixtures_(std::move(fixtures)) {}
    double score_entailment(std::string_view premise, std::string_view hypothesis) override;

private:
    MockFixtures fixtures_;
};

[[nodiscard]] double jaccard_similarity(std::string_view a, std::string_view b);

// Boxes keyed by (image uri, label); a miss is NoDetection.
class MockGrounding final : public GroundingBackend {
public:
    explicit MockGrounding(MockFixtures fixtures = {}) : fixtures_(std::move(fixtures)) {}
    std::vector<PixelBox> detect_grounded_boxes(const ImageRef& image, std::string_view label) override;

private:
    MockFixtures fixtures_;
};

// Scripted answers keyed by (image uri, question); a miss answers "".
class MockVlm final : public VlmBackend {
public:
    explicit MockVlm(MockFixtures fixtures = {}) : fixtures_(std::move(fixtures)) {}
    std::string query_vlm(const ImageRef& image, std::string_view question) override;

private:
    MockFixtures fixtures_;
};

} // namespace tvf::clients
