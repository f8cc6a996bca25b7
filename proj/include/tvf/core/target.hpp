#pragma once

#include <string>
#include <string_view>

#include "tvf/core/types.hpp"

namespace tvf {

// The fine-tuning target string: "<feedback> | <text cue> | <boxes>", where
// <boxes> is "[x1, y1, x2, y2] label" entries joined by " and ".
struct TargetParts {
    std::string feedback;
    std::string text_cue;
    VisualAnnotation visual;

    bool operator==(const TargetParts&) const = default;
};

inline constexpr std::string_view kFieldSeparator = " | ";
inline constexpr std::string_view kBoxJoiner = " and ";

/// Renders a single box entry, e.g. "[339, 245, 581, 834] duck swimming".
[[nodiscard]] std::string render_box(const LabeledBox& box);

/// Renders the box-string part of the target.
[[nodiscard]] std::string render_boxes(const VisualAnnotation& visual);

/// Throws InvalidArgument for empty fields, SeparatorInField when any field
/// (or label) contains '|', and MalformedBox when a label contains '['.
[[nodiscard]] std::string render_target(std::string_view feedback, std::string_view text_cue,
                                        const VisualAnnotation& visual);

/// Parses a box-string. Throws MalformedBox or OutOfRange.
[[nodiscard]] VisualAnnotation parse_boxes(std::string_view s);

/// Inverse of render_target. Throws MalformedSeparators when the string does not
/// contain exactly two " | " separators, then as parse_boxes.
[[nodiscard]] TargetParts parse_target(std::string_view s);

} // namespace tvf
