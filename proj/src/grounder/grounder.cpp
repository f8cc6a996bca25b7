#include "tvf/grounder/grounder.hpp"

#include <algorithm>
#include <cmath>

#include "tvf/core/text.hpp"
#include "tvf/error.hpp"

namespace tvf::grounder {

namespace {

int to_grid(double v, int extent) {
    const double scaled = std::floor(v * NormBox::kMax / static_cast<double>(extent) + 0.5);
    return static_cast<int>(std::clamp(scaled, 0.0, static_cast<double>(NormBox::kMax)));
}

// Returns the (lo, hi) pair for one axis, growing hi when rounding collapsed it.
std::pair<int, int> axis(double lo, double hi, int extent, const char* name) {
    int a = to_grid(lo, extent);
    int b = to_grid(hi, extent);
    if (a == b) {
        if (b >= NormBox::kMax) {
            fail(ErrorCode::Degenerate, std::string("box collapses on the ") + name + " axis at the image edge");
        }
        ++b;
    }
    return {a, b};
}

} // namespace

NormBox normalize_box(const PixelBox& b, const ImageRef& img) {
    require(img.width_px > 0 && img.height_px > 0, "image extents must be positive");
    const bool inside = b.x1 >= 0.0 && b.y1 >= 0.0 && b.x2 <= img.width_px && b.y2 <= img.height_px;
    require(inside, "pixel box lies outside the image");
    require(b.x1 < b.x2 && b.y1 < b.y2, "pixel box has no extent");
    const auto [x1, x2] = axis(b.x1, b.x2, img.width_px, "x");
    const auto [y1, y2] = axis(b.y1, b.y2, img.height_px, "y");
    return NormBox::make(x1, y1, x2, y2);
}

VisualAnnotation ground_label(std::string_view label, const ImageRef& img, GroundingBackend& backend,
                              const GroundingOptions& options) {
    require(!text::is_blank(label), "grounding label must be non-empty");
    require(options.max_boxes >= 1, "max_boxes must be >= 1");
    auto raw = backend.detect_grounded_boxes(img, label);

    std::vector<PixelBox> kept;
    for (auto b : raw) {
        if (!(b.confidence >= options.min_conf)) continue;
        b.x1 = std::clamp(b.x1, 0.0, static_cast<double>(img.width_px));
        b.x2 = std::clamp(b.x2, 0.0, static_cast<double>(img.width_px));
        b.y1 = std::clamp(b.y1, 0.0, static_cast<double>(img.height_px));
        b.y2 = std::clamp(b.y2, 0.0, static_cast<double>(img.height_px));
        if (b.x1 < b.x2 && b.y1 < b.y2) kept.push_back(b);
    }
    std::stable_sort(kept.begin(), kept.end(),
                     [](const PixelBox& a, const PixelBox& b) { return a.confidence > b.confidence; });

    std::vector<LabeledBox> boxes;
    for (const auto& b : kept) {
        if (static_cast<int>(boxes.size()) >= options.max_boxes) break;
        try {
            boxes.push_back(LabeledBox{normalize_box(b, img), std::string(label)});
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Degenerate) throw;
        }
    }
    if (boxes.empty()) {
        fail(ErrorCode::NoDetection, "no box for '" + std::string(label) + "' above confidence " +
                                         std::to_string(options.min_conf));
    }
    return VisualAnnotation::make(std::move(boxes));
}

VisualAnnotation ground_cues(const std::vector<std::string>& cues, const ImageRef& img, GroundingBackend& backend,
                             const GroundingOptions& options) {
    require(!cues.empty(), "at least one cue is required");
    VisualAnnotation out;
    for (const auto& cue : cues) out = out.concat(ground_label(cue, img, backend, options));
    return out;
}

} // namespace tvf::grounder
