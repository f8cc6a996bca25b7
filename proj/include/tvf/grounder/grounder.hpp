#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tvf/clients/backends.hpp"
#include "tvf/core/types.hpp"

namespace tvf::grounder {

struct GroundingOptions {
    int max_boxes = 1;
    double min_conf = 0.35;

    bool operator==(const GroundingOptions&) const = default;
};

/// Maps pixel coordinates to the 0..1000 grid with round-half-up. A side that
/// rounds to zero length grows x2 (or y2) by one; Degenerate if it cannot.
/// InvalidArgument when the box is not inside the image or has no extent.
[[nodiscard]] NormBox normalize_box(const PixelBox& b, const ImageRef& img);

/// Queries the backend, keeps boxes with confidence >= min_conf, highest
/// confidence first, at most max_boxes, each carrying `label`. Pixel boxes
/// poking outside the image are clipped first. Throws NoDetection.
[[nodiscard]] VisualAnnotation ground_label(std::string_view label, const ImageRef& img, GroundingBackend& backend,
                                            const GroundingOptions& options = {});

/// Grounds each cue separately and concatenates the results in cue order.
[[nodiscard]] VisualAnnotation ground_cues(const std::vector<std::string>& cues, const ImageRef& img,
                                           GroundingBackend& backend, const GroundingOptions& options = {});

} // namespace tvf::grounder
