#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tvf/core/types.hpp"

namespace tvf::genpipe {

inline constexpr std::string_view kSummarizeCategory = "summarize";
inline constexpr std::string_view kMergeCategory = "seetrue_merge";
inline constexpr std::string_view kNarrativeDataset = "localized_narratives";
inline constexpr std::string_view kMergeDataset = "seetrue";

// A prompt is context_block + fewshot_block + the tail with its placeholders
// filled in. Placeholders ({caption}, {category}, {feedbacks}) are only
// recognised in the tail.
struct PromptTemplate {
    std::string dataset;
    std::string category;  // object|attribute|action|relation, summarize or seetrue_merge
    std::string context_block;
    std::string fewshot_block;
    std::string tail_format;

    bool operator==(const PromptTemplate&) const = default;
};

// Template file format: optional '#' comment lines, then the three sections
//   --CONTEXT--\n ... --FEWSHOT--\n ... --TAIL--\n ...
// Section text is kept byte for byte (including blank lines). Throws SchemaError.
[[nodiscard]] PromptTemplate parse_template(std::string_view content, std::string dataset, std::string category);

/// Lowercase, keeping only letters, digits and underscores: "Open Images" -> "openimages".
[[nodiscard]] std::string dataset_key(std::string_view dataset);

class TemplateRegistry {
public:
    /// The templates compiled in from data/templates.
    static const TemplateRegistry& builtin();

    /// Reads every <dataset>.<category>.tmpl file in `dir`. Throws ConfigError.
    static TemplateRegistry load(const std::filesystem::path& dir);

    void add(PromptTemplate t);

    /// Throws UnknownTemplate.
    [[nodiscard]] const PromptTemplate& get(std::string_view dataset, std::string_view category) const;
    [[nodiscard]] const PromptTemplate& get(std::string_view dataset, MisalignmentType type) const;
    [[nodiscard]] bool contains(std::string_view dataset, std::string_view category) const;

    [[nodiscard]] std::vector<std::pair<std::string, std::string>> keys() const;

private:
    std::map<std::pair<std::string, std::string>, PromptTemplate> templates_;
};

using PromptVars = std::map<std::string, std::string, std::less<>>;

/// Single-pass substitution of {name} in `format`; unknown names stay literal.
[[nodiscard]] std::string substitute(std::string_view format, const PromptVars& vars);

/// context + fewshot + tail. {caption} is always bound; {category} is bound to the
/// prompt label for misalignment templates. Throws InvalidArgument on an empty caption.
[[nodiscard]] std::string build_prompt(const PromptTemplate& t, std::string_view caption,
                                       const PromptVars& extra = {});

/// ["first", "second", NaN] with absent entries written as NaN.
[[nodiscard]] std::string render_feedback_list(const std::vector<std::optional<std::string>>& feedbacks);

} // namespace tvf::genpipe
