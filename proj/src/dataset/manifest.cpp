#include "tvf/dataset/manifest.hpp"

#include <fstream>
#include <set>

#include "tvf/candidates/candidates.hpp"
#include "tvf/core/records_json.hpp"
#include "tvf/core/text.hpp"
#include "tvf/error.hpp"
#include "tvf/util/parallel.hpp"

namespace tvf::dataset {

namespace {

using json_io::Json;

[[noreturn]] void schema(const std::string& msg) {
    fail(ErrorCode::SchemaError, msg);
}

std::vector<std::string> caption_list(const Json& j) {
    std::vector<std::string> out;
    if (j.contains("captions")) {
        const Json& arr = j.at("captions");
        if (!arr.is_array()) schema("'captions' must be an array");
        for (const auto& c : arr) {
            if (!c.is_string()) schema("'captions' entries must be strings");
            out.push_back(c.get<std::string>());
        }
    } else if (j.contains("caption")) {
        out.push_back(json_io::string_field(j, "caption"));
    }
    return out;
}

ManifestRecord parse_record(const Json& j, const Manifest& m) {
    ManifestRecord r;
    r.id = json_io::string_field(j, "id");
    if (text::is_blank(r.id)) schema("record id must be non-empty");
    Json image = json_io::field(j, "image");
    if (!image.is_object()) schema("'image' must be an object");
    if (!image.contains("kind")) image["kind"] = std::string(to_string(default_image_kind(m.dataset_name)));
    r.image = json_io::image_from_json(image);

    if (m.caption_style == CaptionStyle::localized_narrative) {
        if (j.contains("captions") || j.contains("caption")) schema("localized_narrative records carry a narrative, not captions");
        r.narrative = json_io::string_field(j, "narrative");
        if (text::is_blank(*r.narrative)) schema("narrative must be non-empty");
        return r;
    }
    if (j.contains("narrative")) schema("narrative is only allowed for localized_narrative manifests");
    r.captions = caption_list(j);
    if (r.captions.empty()) schema("record has no captions");
    if (m.caption_style == CaptionStyle::predicted && r.captions.size() != 1) {
        schema("predicted records carry exactly one caption");
    }
    for (const auto& c : r.captions) {
        if (text::is_blank(c)) schema("captions must be non-empty");
    }
    return r;
}

} // namespace

std::string_view to_string(CaptionStyle s) noexcept {
    switch (s) {
        case CaptionStyle::human_multi:         return "human_multi";
        case CaptionStyle::predicted:           return "predicted";
        case CaptionStyle::localized_narrative: return "localized_narrative";
    }
    return "human_multi";
}

CaptionStyle parse_caption_style(std::string_view s) {
    if (s == "human_multi") return CaptionStyle::human_multi;
    if (s == "predicted") return CaptionStyle::predicted;
    if (s == "localized_narrative") return CaptionStyle::localized_narrative;
    schema("unknown caption_style '" + std::string(s) + "'");
}

ImageKind default_image_kind(std::string_view dataset) {
    const auto d = text::to_lower(dataset);
    return (d == "pickapic" || d == "imagereward") ? ImageKind::synthetic : ImageKind::natural;
}

Manifest read_manifest(std::istream& in) {
    Manifest m;
    bool have_header = false;
    std::set<std::string> ids;
    json_io::read_jsonl(in, [&](const Json& j, long) {
        if (!have_header) {
            m.dataset_name = json_io::string_field(j, "dataset_name");
            if (text::is_blank(m.dataset_name)) schema("dataset_name must be non-empty");
            m.caption_style = parse_caption_style(json_io::string_field(j, "caption_style"));
            have_header = true;
            return;
        }
        auto r = parse_record(j, m);
        if (!ids.insert(r.id).second) schema("duplicate record id '" + r.id + "'");
        m.records.push_back(std::move(r));
    });
    if (!have_header) throw Error(ErrorCode::SchemaError, "line 1: manifest has no header", 1);
    return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ConfigError, "cannot read manifest " + path.string());
    return read_manifest(in);
}

std::vector<AlignedPair> ingest(const Manifest& manifest, LlmBackend* llm, const genpipe::GenerationOptions& options,
                                int workers) {
    if (manifest.caption_style == CaptionStyle::localized_narrative && llm == nullptr) {
        fail(ErrorCode::ConfigError, "localized_narrative manifests need an LLM backend");
    }
    std::vector<AlignedPair> out(manifest.records.size());
    util::parallel_for(manifest.records.size(), workers, [&](std::size_t i) {
        const auto& r = manifest.records[i];
        AlignedPair p;
        p.id = r.id;
        p.image = r.image;
        p.source_dataset = manifest.dataset_name;
        switch (manifest.caption_style) {
            case CaptionStyle::human_multi:
                p.caption = candidates::select_positive_caption(r.captions);
                p.caption_provenance = CaptionProvenance::human_annotated;
                break;
            case CaptionStyle::predicted:
                p.caption = r.captions.front();
                p.caption_provenance = CaptionProvenance::model_predicted;
                break;
            case CaptionStyle::localized_narrative:
                p.caption = genpipe::summarize_narrative(*r.narrative, *llm, options);
                p.caption_provenance = CaptionProvenance::narrative_summarized;
                break;
        }
        out[i] = std::move(p);
    });
    return out;
}

} // namespace tvf::dataset
