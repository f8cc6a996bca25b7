#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tvf/clients/backends.hpp"
#include "tvf/core/types.hpp"
#include "tvf/genpipe/generation.hpp"

namespace tvf::dataset {

enum class CaptionStyle { human_multi, predicted, localized_narrative };

[[nodiscard]] std::string_view to_string(CaptionStyle s) noexcept;
[[nodiscard]] CaptionStyle parse_caption_style(std::string_view s);

/// Image kind a source dataset declares: synthetic for pickapic and imagereward.
[[nodiscard]] ImageKind default_image_kind(std::string_view dataset);

struct ManifestRecord {
    std::string id;
    ImageRef image;
    std::vector<std::string> captions;    // human_multi and predicted
    std::optional<std::string> narrative;  // localized_narrative
};

// Line 1: {"dataset_name": ..., "caption_style": ...}
// Then one record per line:
//   {"id", "image": {"uri", "width_px", "height_px"[, "kind"]}, "captions": [...]}
//   {"id", "image": {...}, "narrative": "..."}             (localized_narrative)
// predicted records carry exactly one caption ("captions": [c] or "caption": c).
struct Manifest {
    std::string dataset_name;
    CaptionStyle caption_style = CaptionStyle::human_multi;
    std::vector<ManifestRecord> records;
};

/// Throws SchemaError with the 1-based line number of the offending line.
[[nodiscard]] Manifest read_manifest(std::istream& in);
[[nodiscard]] Manifest load_manifest(const std::filesystem::path& path);

/// human_multi: longest caption; predicted: the caption as is; narrative:
/// summarize_narrative through `llm` (required for that style only).
[[nodiscard]] std::vector<AlignedPair> ingest(const Manifest& manifest, LlmBackend* llm,
                                              const genpipe::GenerationOptions& options = {}, int workers = 1);

} // namespace tvf::dataset
