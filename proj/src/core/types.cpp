#include "tvf/core/types.hpp"

#include "tvf/core/text.hpp"
#include "tvf/error.hpp"

namespace tvf {

ImageRef ImageRef::make(std::string uri, int width_px, int height_px, ImageKind kind) {
    require(!text::is_blank(uri), "image uri must be non-empty");
    require(width_px > 0 && height_px > 0, "image extents must be positive");
    return ImageRef{std::move(uri), width_px, height_px, kind};
}

std::string_view to_string(MisalignmentType t) noexcept {
    switch (t) {
        case MisalignmentType::object:    return "object";
        case MisalignmentType::attribute: return "attribute";
        case MisalignmentType::action:    return "action";
        case MisalignmentType::relation:  return "relation";
    }
    return "object";
}

std::string_view prompt_label(MisalignmentType t) noexcept {
    switch (t) {
        case MisalignmentType::object:    return "Object/Noun";
        case MisalignmentType::attribute: return "Attribute/Adjective";
        case MisalignmentType::action:    return "Action/Verb";
        case MisalignmentType::relation:  return "Relation";
    }
    return "Object/Noun";
}

MisalignmentType parse_misalignment_type(std::string_view s) {
    std::string v = text::to_lower(text::trim(s));
    while (!v.empty() && (v.back() == '.' || v.back() == ' ')) v.pop_back();
    for (const auto part : text::split(v, "/")) {
        const auto p = text::trim(part);
        if (p == "object" || p == "noun") return MisalignmentType::object;
        if (p == "attribute" || p == "adjective") return MisalignmentType::attribute;
        if (p == "action" || p == "verb") return MisalignmentType::action;
        if (p == "relation" || p == "spatial relation") return MisalignmentType::relation;
    }
    fail(ErrorCode::UnknownType, "unknown misalignment type '" + std::string(s) + "'");
}

std::string_view to_string(ImageKind k) noexcept {
    return k == ImageKind::natural ? "natural" : "synthetic";
}

ImageKind parse_image_kind(std::string_view s) {
    if (s == "natural") return ImageKind::natural;
    if (s == "synthetic") return ImageKind::synthetic;
    fail(ErrorCode::InvalidArgument, "unknown image kind '" + std::string(s) + "'");
}

std::string_view to_string(CaptionProvenance p) noexcept {
    switch (p) {
        case CaptionProvenance::human_annotated:      return "human_annotated";
        case CaptionProvenance::model_predicted:      return "model_predicted";
        case CaptionProvenance::narrative_summarized: return "narrative_summarized";
    }
    return "human_annotated";
}

CaptionProvenance parse_caption_provenance(std::string_view s) {
    if (s == "human_annotated") return CaptionProvenance::human_annotated;
    if (s == "model_predicted") return CaptionProvenance::model_predicted;
    if (s == "narrative_summarized") return CaptionProvenance::narrative_summarized;
    fail(ErrorCode::InvalidArgument, "unknown caption provenance '" + std::string(s) + "'");
}

NormBox NormBox::make(int x1, int y1, int x2, int y2) {
    for (int v : {x1, y1, x2, y2}) {
        if (v < 0 || v > kMax) {
            fail(ErrorCode::OutOfRange,
                 "box coordinate " + std::to_string(v) + " outside [0, 1000]");
        }
    }
    if (x1 >= x2 || y1 >= y2) {
        fail(ErrorCode::Degenerate, "box has zero width or height");
    }
    return NormBox(x1, y1, x2, y2);
}

VisualAnnotation VisualAnnotation::make(std::vector<LabeledBox> boxes) {
    require(!boxes.empty(), "visual annotation needs at least one box");
    for (const auto& b : boxes) {
        require(!text::is_blank(b.label), "box label must be non-empty");
    }
    return VisualAnnotation(std::move(boxes));
}

std::vector<NormBox> VisualAnnotation::norm_boxes() const {
    std::vector<NormBox> out;
    out.reserve(boxes_.size());
    for (const auto& b : boxes_) out.push_back(b.box);
    return out;
}

VisualAnnotation VisualAnnotation::concat(const VisualAnnotation& other) const {
    auto merged = boxes_;
    merged.insert(merged.end(), other.boxes_.begin(), other.boxes_.end());
    return VisualAnnotation(std::move(merged));
}

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::keep:                 return "keep";
        case Verdict::reject_contradiction: return "reject_contradiction";
        case Verdict::reject_feedback:      return "reject_feedback";
        case Verdict::reject_both:          return "reject_both";
    }
    return "keep";
}

std::string_view to_string(ReviewStatus s) noexcept {
    switch (s) {
        case ReviewStatus::pending:  return "pending";
        case ReviewStatus::accepted: return "accepted";
        case ReviewStatus::rejected: return "rejected";
    }
    return "pending";
}

ReviewStatus parse_review_status(std::string_view s) {
    if (s == "pending") return ReviewStatus::pending;
    if (s == "accepted") return ReviewStatus::accepted;
    if (s == "rejected") return ReviewStatus::rejected;
    fail(ErrorCode::InvalidArgument, "unknown review status '" + std::string(s) + "'");
}

void BenchmarkInstance::validate() const {
    require(!text::is_blank(id), "benchmark instance id must be non-empty");
    require(!text::is_blank(caption), "benchmark caption must be non-empty");
    if (alignment_label) {
        require(!gt_feedback && !gt_misalignment_in_text && !gt_visual,
                "aligned instance '" + id + "' must not carry ground-truth feedback");
    }
}

} // namespace tvf
