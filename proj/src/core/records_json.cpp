#include "tvf/core/records_json.hpp"

#include <cstdint>

#include "tvf/core/text.hpp"
#include "tvf/error.hpp"

namespace tvf::json_io {

namespace {

[[noreturn]] void schema(const std::string& msg) {
    fail(ErrorCode::SchemaError, msg);
}

Json optional_string(const std::optional<std::string>& s) {
    return s ? Json(*s) : Json(nullptr);
}

std::optional<std::string> optional_string_field(const Json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return string_field(j, key);
}

} // namespace

const Json& field(const Json& j, const char* key) {
    if (!j.is_object()) schema("expected a JSON object");
    auto it = j.find(key);
    if (it == j.end()) schema(std::string("missing field '") + key + "'");
    return *it;
}

std::string string_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_string()) schema(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

double number_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number()) schema(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

long long int_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number_integer()) schema(std::string("field '") + key + "' must be an integer");
    return v.get<long long>();
}

bool bool_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_boolean()) schema(std::string("field '") + key + "' must be a boolean");
    return v.get<bool>();
}

Json to_json(const ImageRef& image) {
    Json j = Json::object();
    j["uri"] = image.uri;
    j["width_px"] = image.width_px;
    j["height_px"] = image.height_px;
    j["kind"] = std::string(to_string(image.kind));
    return j;
}

ImageRef image_from_json(const Json& j) {
    const auto w = int_field(j, "width_px");
    const auto h = int_field(j, "height_px");
    if (w <= 0 || h <= 0 || w > INT32_MAX || h > INT32_MAX) schema("image extents must be positive");
    try {
        return ImageRef::make(string_field(j, "uri"), static_cast<int>(w), static_cast<int>(h),
                              parse_image_kind(string_field(j, "kind")));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SchemaError) throw;
        schema(e.what());
    }
}

Json to_json(const VisualAnnotation& visual) {
    Json arr = Json::array();
    for (const auto& b : visual.boxes()) {
        Json e = Json::object();
        e["box"] = Json::array({b.box.x1(), b.box.y1(), b.box.x2(), b.box.y2()});
        e["label"] = b.label;
        arr.push_back(std::move(e));
    }
    return arr;
}

VisualAnnotation visual_from_json(const Json& j) {
    if (!j.is_array()) schema("'visual' must be an array");
    std::vector<LabeledBox> boxes;
    for (const auto& e : j) {
        const Json& box = field(e, "box");
        if (!box.is_array() || box.size() != 4) schema("'box' must be an array of four integers");
        int c[4];
        for (std::size_t i = 0; i < 4; ++i) {
            if (!box[i].is_number_integer()) schema("'box' must be an array of four integers");
            const auto v = box[i].get<long long>();
            if (v < 0 || v > NormBox::kMax) {
                fail(ErrorCode::OutOfRange, "box coordinate " + std::to_string(v) + " outside [0, 1000]");
            }
            c[i] = static_cast<int>(v);
        }
        boxes.push_back(LabeledBox{NormBox::make(c[0], c[1], c[2], c[3]), string_field(e, "label")});
    }
    return VisualAnnotation::make(std::move(boxes));
}

Json to_json(const AlignedPair& pair) {
    Json j = Json::object();
    j["id"] = pair.id;
    j["image"] = to_json(pair.image);
    j["caption"] = pair.caption;
    j["caption_provenance"] = std::string(to_string(pair.caption_provenance));
    j["source_dataset"] = pair.source_dataset;
    return j;
}

AlignedPair aligned_pair_from_json(const Json& j) {
    AlignedPair p;
    p.id = string_field(j, "id");
    p.image = image_from_json(field(j, "image"));
    p.caption = string_field(j, "caption");
    if (text::is_blank(p.caption)) schema("caption must be non-empty");
    p.caption_provenance = parse_caption_provenance(string_field(j, "caption_provenance"));
    p.source_dataset = string_field(j, "source_dataset");
    return p;
}

Json to_json(const TrainingRecord& rec) {
    Json j = Json::object();
    j["id"] = rec.id;
    j["source_dataset"] = rec.source_dataset;
    j["image"] = to_json(rec.image);
    j["positive_caption"] = rec.positive_caption;
    j["negative_caption"] = rec.negative_caption;
    j["misalignment_type"] = std::string(to_string(rec.misalignment_type));
    j["feedback"] = rec.feedback;
    j["misalignment_in_text"] = rec.misalignment_in_text;
    j["visual"] = to_json(rec.visual);
    Json v = Json::object();
    v["contradiction_score"] = rec.validation.contradiction_score;
    v["feedback_score"] = rec.validation.feedback_score;
    j["validation"] = std::move(v);
    return j;
}

TrainingRecord training_record_from_json(const Json& j) {
    TrainingRecord r;
    r.id = string_field(j, "id");
    r.source_dataset = string_field(j, "source_dataset");
    r.image = image_from_json(field(j, "image"));
    r.positive_caption = string_field(j, "positive_caption");
    r.negative_caption = string_field(j, "negative_caption");
    r.misalignment_type = parse_misalignment_type(string_field(j, "misalignment_type"));
    r.feedback = string_field(j, "feedback");
    r.misalignment_in_text = string_field(j, "misalignment_in_text");
    r.visual = visual_from_json(field(j, "visual"));
    const Json& v = field(j, "validation");
    r.validation.contradiction_score = number_field(v, "contradiction_score");
    r.validation.feedback_score = number_field(v, "feedback_score");
    // Only kept records are ever written.
    r.validation.verdict = Verdict::keep;
    return r;
}

Json to_json(const BenchmarkInstance& inst) {
    Json j = Json::object();
    j["id"] = inst.id;
    j["image"] = to_json(inst.image);
    j["caption"] = inst.caption;
    j["alignment_label"] = inst.alignment_label;
    j["gt_feedback"] = optional_string(inst.gt_feedback);
    j["gt_misalignment_in_text"] = optional_string(inst.gt_misalignment_in_text);
    j["gt_visual"] = inst.gt_visual ? to_json(*inst.gt_visual) : Json(nullptr);
    j["review_status"] = std::string(to_string(inst.review_status));
    return j;
}

BenchmarkInstance benchmark_instance_from_json(const Json& j) {
    BenchmarkInstance b;
    b.id = string_field(j, "id");
    b.image = image_from_json(field(j, "image"));
    b.caption = string_field(j, "caption");
    b.alignment_label = bool_field(j, "alignment_label");
    b.gt_feedback = optional_string_field(j, "gt_feedback");
    b.gt_misalignment_in_text = optional_string_field(j, "gt_misalignment_in_text");
    if (j.contains("gt_visual") && !j.at("gt_visual").is_null()) {
        b.gt_visual = visual_from_json(j.at("gt_visual"));
    }
    b.review_status = j.contains("review_status")
                          ? parse_review_status(string_field(j, "review_status"))
                          : ReviewStatus::pending;
    try {
        b.validate();
    } catch (const Error& e) {
        schema(e.what());
    }
    return b;
}

std::string to_jsonl_line(const Json& j) {
    return j.dump(-1, ' ', false, nlohmann::detail::error_handler_t::strict);
}

void read_jsonl(std::istream& in, const std::function<void(const Json&, long)>& on_line) {
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::is_blank(line)) continue;
        try {
            const Json j = Json::parse(line);
            on_line(j, line_no);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::SchemaError && e.line() > 0) throw;
            throw Error(ErrorCode::SchemaError,
                        "line " + std::to_string(line_no) + ": " + e.what(), line_no);
        } catch (const std::exception& e) {
            throw Error(ErrorCode::SchemaError,
                        "line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
    }
}

std::vector<TrainingRecord> read_training_records(std::istream& in) {
    return read_jsonl_as<TrainingRecord>(in, training_record_from_json);
}

std::vector<BenchmarkInstance> read_benchmark_instances(std::istream& in) {
    return read_jsonl_as<BenchmarkInstance>(in, benchmark_instance_from_json);
}

std::vector<AlignedPair> read_aligned_pairs(std::istream& in) {
    return read_jsonl_as<AlignedPair>(in, aligned_pair_from_json);
}

void write_jsonl(std::ostream& out, const std::vector<TrainingRecord>& records) {
    for (const auto& r : records) out << to_jsonl_line(to_json(r)) << '\n';
}

void write_jsonl(std::ostream& out, const std::vector<BenchmarkInstance>& instances) {
    for (const auto& b : instances) out << to_jsonl_line(to_json(b)) << '\n';
}

void write_jsonl(std::ostream& out, const std::vector<AlignedPair>& pairs) {
    for (const auto& p : pairs) out << to_jsonl_line(to_json(p)) << '\n';
}

} // namespace tvf::json_io
