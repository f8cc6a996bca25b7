#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tvf/core/types.hpp"

// Contracts for the external model roles. Implementations must be safe for
// concurrent calls from any number of threads.
namespace tvf {

struct DecodingParams {
    double temperature = 0.4;
    int max_tokens = 700;
    double top_p = 0.95;
    int top_k = 30;

    bool operator==(const DecodingParams&) const = default;
};

enum class PartOfSpeech { noun, adjective, verb, preposition, other };

[[nodiscard]] std::string_view to_string(PartOfSpeech p) noexcept;
[[nodiscard]] PartOfSpeech parse_part_of_speech(std::string_view s);

struct TaggedToken {
    std::string text;
    PartOfSpeech pos = PartOfSpeech::other;
    std::size_t char_start = 0;  // byte offset into the caption
    std::size_t char_end = 0;    // exclusive

    bool operator==(const TaggedToken&) const = default;
};

// Raw grounding output in pixel space of the queried image.
struct PixelBox {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;
    double confidence = 0.0;

    bool operator==(const PixelBox&) const = default;
};

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual std::string complete_chat(std::string_view prompt, const DecodingParams& params) = 0;
};

class NliBackend {
public:
    virtual ~NliBackend() = default;
    /// Entailment probability of `hypothesis` given `premise`, in [0,1].
    virtual double score_entailment(std::string_view premise, std::string_view hypothesis) = 0;
};

class GroundingBackend {
public:
    virtual ~GroundingBackend() = default;
    /// Throws NoDetection when the backend finds nothing for the label.
    virtual std::vector<PixelBox> detect_grounded_boxes(const ImageRef& image,
                                                        std::string_view label) = 0;
};

class VlmBackend {
public:
    virtual ~VlmBackend() = default;
    virtual std::string query_vlm(const ImageRef& image, std::string_view question) = 0;
};

class TaggerBackend {
public:
    virtual ~TaggerBackend() = default;
    virtual std::vector<TaggedToken> tag(std::string_view caption) = 0;
};

} // namespace tvf
