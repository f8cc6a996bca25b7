#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tvf {

enum class ImageKind { natural, synthetic };

struct ImageRef {
    std::string uri;
    int width_px = 0;
    int height_px = 0;
    ImageKind kind = ImageKind::natural;

    // Throws InvalidArgument unless both extents are positive and the uri is set.
    static ImageRef make(std::string uri, int width_px, int height_px, ImageKind kind);

    bool operator==(const ImageRef&) const = default;
};

enum class CaptionProvenance { human_annotated, model_predicted, narrative_summarized };

struct AlignedPair {
    std::string id;
    ImageRef image;
    std::string caption;
    CaptionProvenance caption_provenance = CaptionProvenance::human_annotated;
    std::string source_dataset;

    bool operator==(const AlignedPair&) const = default;
};

enum class MisalignmentType { object, attribute, action, relation };

inline constexpr std::array<MisalignmentType, 4> kAllMisalignmentTypes = {
    MisalignmentType::object, MisalignmentType::attribute, MisalignmentType::action,
    MisalignmentType::relation};

/// Canonical lowercase name: "object", "attribute", "action", "relation".
[[nodiscard]] std::string_view to_string(MisalignmentType t) noexcept;

/// Label used by the generation prompts: "Object/Noun", "Attribute/Adjective", "Action/Verb", "Relation".
[[nodiscard]] std::string_view prompt_label(MisalignmentType t) noexcept;

/// Accepts the canonical names, the prompt labels, and either half of a
/// "X/Y" label, case-insensitively. Throws UnknownType otherwise.
[[nodiscard]] MisalignmentType parse_misalignment_type(std::string_view s);

[[nodiscard]] std::string_view to_string(ImageKind k) noexcept;
[[nodiscard]] ImageKind parse_image_kind(std::string_view s);
[[nodiscard]] std::string_view to_string(CaptionProvenance p) noexcept;
[[nodiscard]] CaptionProvenance parse_caption_provenance(std::string_view s);

struct GenerationRecord {
    std::string contradiction_caption;
    std::string feedback;
    std::string caption_cue;
    std::string contradiction_cue;
    MisalignmentType misalignment_type = MisalignmentType::object;
    std::string raw_llm_text;

    bool operator==(const GenerationRecord&) const = default;
};

// Closed rectangle [x1,x2] x [y1,y2] on the 0..1000 grid; area = (x2-x1)(y2-y1).
class NormBox {
public:
    static constexpr int kMax = 1000;

    // Throws OutOfRange for coordinates outside [0,1000], Degenerate for zero width/height.
    static NormBox make(int x1, int y1, int x2, int y2);

    [[nodiscard]] int x1() const noexcept { return x1_; }
    [[nodiscard]] int y1() const noexcept { return y1_; }
    [[nodiscard]] int x2() const noexcept { return x2_; }
    [[nodiscard]] int y2() const noexcept { return y2_; }
    [[nodiscard]] std::int64_t area() const noexcept {
        return static_cast<std::int64_t>(x2_ - x1_) * (y2_ - y1_);
    }

    bool operator==(const NormBox&) const = default;

private:
    NormBox(int x1, int y1, int x2, int y2) noexcept : x1_(x1), y1_(y1), x2_(x2), y2_(y2) {}

    int x1_;
    int y1_;
    int x2_;
    int y2_;
};

struct LabeledBox {
    NormBox box;
    std::string label;

    bool operator==(const LabeledBox&) const = default;
};

class VisualAnnotation {
public:
    // Empty placeholder; only `make` yields a valid annotation.
    VisualAnnotation() = default;

    // Throws InvalidArgument on an empty list or an empty label.
    static VisualAnnotation make(std::vector<LabeledBox> boxes);

    [[nodiscard]] const std::vector<LabeledBox>& boxes() const noexcept { return boxes_; }
    [[nodiscard]] std::vector<NormBox> norm_boxes() const;
    [[nodiscard]] std::size_t size() const noexcept { return boxes_.size(); }
    [[nodiscard]] bool empty() const noexcept { return boxes_.empty(); }

    // Appends another annotation's boxes, keeping order.
    [[nodiscard]] VisualAnnotation concat(const VisualAnnotation& other) const;

    bool operator==(const VisualAnnotation&) const = default;

private:
    explicit VisualAnnotation(std::vector<LabeledBox> boxes) : boxes_(std::move(boxes)) {}

    std::vector<LabeledBox> boxes_;
};

enum class Verdict { keep, reject_contradiction, reject_feedback, reject_both };

[[nodiscard]] std::string_view to_string(Verdict v) noexcept;

struct ValidationScores {
    double contradiction_score = 0.0;
    double feedback_score = 0.0;
    Verdict verdict = Verdict::keep;

    bool operator==(const ValidationScores&) const = default;
};

struct TrainingRecord {
    std::string id;
    std::string source_dataset;
    ImageRef image;
    std::string positive_caption;
    std::string negative_caption;
    MisalignmentType misalignment_type = MisalignmentType::object;
    std::string feedback;
    std::string misalignment_in_text;
    VisualAnnotation visual;
    ValidationScores validation;

    bool operator==(const TrainingRecord&) const = default;
};

enum class ReviewStatus { pending, accepted, rejected };

[[nodiscard]] std::string_view to_string(ReviewStatus s) noexcept;
[[nodiscard]] ReviewStatus parse_review_status(std::string_view s);

struct BenchmarkInstance {
    std::string id;
    ImageRef image;
    std::string caption;
    bool alignment_label = false;
    std::optional<std::string> gt_feedback;
    std::optional<std::string> gt_misalignment_in_text;
    std::optional<VisualAnnotation> gt_visual;
    ReviewStatus review_status = ReviewStatus::pending;

    // Throws InvalidArgument when an aligned instance carries ground-truth feedback.
    void validate() const;

    bool operator==(const BenchmarkInstance&) const = default;
};

} // namespace tvf
