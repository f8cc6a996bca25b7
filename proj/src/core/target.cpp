#include "tvf/core/target.hpp"

#include <charconv>
#include <cstddef>
#include <vector>

#include "tvf/core/text.hpp"
#include "tvf/error.hpp"

namespace tvf {

namespace {

void check_field(std::string_view value, std::string_view name) {
    require(!text::is_blank(value), std::string(name) + " must be non-empty");
    if (value.find('|') != std::string_view::npos) {
        fail(ErrorCode::SeparatorInField, std::string(name) + " contains the reserved '|'");
    }
}

// Cursor over one "[x1, y1, x2, y2] label" entry.
class BoxEntryParser {
public:
    explicit BoxEntryParser(std::string_view s) : s_(s) {}

    LabeledBox parse() {
        expect('[');
        int c[4];
        for (int i = 0; i < 4; ++i) {
            skip_spaces();
            c[i] = read_int();
            skip_spaces();
            expect(i < 3 ? ',' : ']');
        }
        if (pos_ >= s_.size() || s_[pos_] != ' ') {
            bad("expected a space before the label");
        }
        ++pos_;
        std::string_view label = s_.substr(pos_);
        if (text::is_blank(label)) bad("missing label");
        if (label.find('[') != std::string_view::npos) bad("label contains '['");
        return LabeledBox{NormBox::make(c[0], c[1], c[2], c[3]), std::string(label)};
    }

private:
    [[noreturn]] void bad(const std::string& why) const {
        fail(ErrorCode::MalformedBox, "malformed box '" + std::string(s_) + "': " + why);
    }

    void expect(char ch) {
        if (pos_ >= s_.size() || s_[pos_] != ch) bad(std::string("expected '") + ch + "'");
        ++pos_;
    }

    void skip_spaces() {
        while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
    }

    int read_int() {
        const char* begin = s_.data() + pos_;
        const char* end = s_.data() + s_.size();
        if (begin < end && *begin == '+') bad("unexpected '+'");
        long long v = 0;
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec == std::errc::result_out_of_range) {
            fail(ErrorCode::OutOfRange, "box coordinate out of range in '" + std::string(s_) + "'");
        }
        if (ec != std::errc{}) bad("expected an integer");
        pos_ += static_cast<std::size_t>(ptr - begin);
        if (v < 0 || v > NormBox::kMax) {
            fail(ErrorCode::OutOfRange,
                 "box coordinate " + std::to_string(v) + " outside [0, 1000]");
        }
        return static_cast<int>(v);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace

std::string render_box(const LabeledBox& b) {
    std::string out = "[";
    out += std::to_string(b.box.x1());
    out += ", ";
    out += std::to_string(b.box.y1());
    out += ", ";
    out += std::to_string(b.box.x2());
    out += ", ";
    out += std::to_string(b.box.y2());
    out += "] ";
    out += b.label;
    return out;
}

std::string render_boxes(const VisualAnnotation& visual) {
    require(!visual.empty(), "visual annotation must be non-empty");
    std::vector<std::string> entries;
    entries.reserve(visual.size());
    for (const auto& b : visual.boxes()) {
        check_field(b.label, "box label");
        if (b.label.find('[') != std::string::npos) {
            fail(ErrorCode::MalformedBox, "box label '" + b.label + "' contains '['");
        }
        entries.push_back(render_box(b));
    }
    return text::join(entries, kBoxJoiner);
}

std::string render_target(std::string_view feedback, std::string_view text_cue,
                          const VisualAnnotation& visual) {
    check_field(feedback, "feedback");
    check_field(text_cue, "text cue");
    std::string out(feedback);
    out += kFieldSeparator;
    out += text_cue;
    out += kFieldSeparator;
    out += render_boxes(visual);
    return out;
}

VisualAnnotation parse_boxes(std::string_view s) {
    if (s.empty() || s.front() != '[') {
        fail(ErrorCode::MalformedBox, "box string must start with '[': '" + std::string(s) + "'");
    }
    // Entries are separated by " and " immediately followed by the next '['.
    static constexpr std::string_view kEntrySep = " and [";
    std::vector<LabeledBox> boxes;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(kEntrySep, start);
        const std::size_t end = pos == std::string_view::npos ? s.size() : pos;
        boxes.push_back(BoxEntryParser(s.substr(start, end - start)).parse());
        if (pos == std::string_view::npos) break;
        start = pos + kBoxJoiner.size();
    }
    return VisualAnnotation::make(std::move(boxes));
}

TargetParts parse_target(std::string_view s) {
    const auto fields = text::split(s, kFieldSeparator);
    if (fields.size() != 3) {
        fail(ErrorCode::MalformedSeparators,
             "expected exactly two ' | ' separators, found " + std::to_string(fields.size() - 1));
    }
    if (text::is_blank(fields[0]) || text::is_blank(fields[1])) {
        fail(ErrorCode::MalformedSeparators, "empty feedback or text cue field");
    }
    return TargetParts{std::string(fields[0]), std::string(fields[1]), parse_boxes(fields[2])};
}

} // namespace tvf
