#include "tvf/genpipe/templates.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tvf/core/text.hpp"
#include "tvf/error.hpp"
#include "tvf/util/embedded_data.hpp"

namespace tvf::genpipe {

namespace {

constexpr std::string_view kContext = "--CONTEXT--";
constexpr std::string_view kFewshot = "--FEWSHOT--";
constexpr std::string_view kTail = "--TAIL--";
constexpr std::string_view kExt = ".tmpl";

bool is_category(std::string_view c) {
    if (c == kSummarizeCategory || c == kMergeCategory) return true;
    for (auto t : kAllMisalignmentTypes) {
        if (c == to_string(t)) return true;
    }
    return false;
}

// "coco.relation.tmpl" -> ("coco", "relation"); nullopt for other names.
std::optional<std::pair<std::string, std::string>> split_name(std::string_view name) {
    if (name.size() <= kExt.size() || name.substr(name.size() - kExt.size()) != kExt) return std::nullopt;
    name.remove_suffix(kExt.size());
    const auto dot = name.rfind('.');
    if (dot == std::string_view::npos || dot == 0) return std::nullopt;
    return std::pair{std::string(name.substr(0, dot)), std::string(name.substr(dot + 1))};
}

} // namespace

PromptTemplate parse_template(std::string_view content, std::string dataset, std::string category) {
    if (!is_category(category)) {
        fail(ErrorCode::SchemaError, "template category '" + category + "' is not recognised");
    }
    PromptTemplate t{std::move(dataset), std::move(category), {}, {}, {}};
    std::string* current = nullptr;
    int seen = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t nl = content.find('\n', pos);
        const bool last = nl == std::string_view::npos;
        const std::size_t end = last ? content.size() : nl + 1;
        std::string_view line = content.substr(pos, end - pos);
        std::string_view bare = line;
        while (!bare.empty() && (bare.back() == '\n' || bare.back() == '\r')) bare.remove_suffix(1);
        pos = end;

        if (bare == kContext || bare == kFewshot || bare == kTail) {
            const int expected = bare == kContext ? 0 : bare == kFewshot ? 1 : 2;
            if (expected != seen) fail(ErrorCode::SchemaError, "template sections out of order in " + t.dataset + "." + t.category);
            current = expected == 0 ? &t.context_block : expected == 1 ? &t.fewshot_block : &t.tail_format;
            ++seen;
            continue;
        }
        if (current == nullptr) {
            // Preamble: comments and blank lines only.
            if (!text::is_blank(bare) && bare.front() != '#') {
                fail(ErrorCode::SchemaError, "text before --CONTEXT-- in " + t.dataset + "." + t.category);
            }
            continue;
        }
        current->append(line);
    }
    if (seen != 3) fail(ErrorCode::SchemaError, "template " + t.dataset + "." + t.category + " lacks a section");
    if (t.tail_format.find("{caption}") == std::string::npos) {
        fail(ErrorCode::SchemaError, "template tail lacks {caption}: " + t.dataset + "." + t.category);
    }
    return t;
}

std::string dataset_key(std::string_view dataset) {
    std::string out;
    for (char c : text::to_lower(dataset)) {
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_') out.push_back(c);
    }
    return out;
}

const TemplateRegistry& TemplateRegistry::builtin() {
    static const TemplateRegistry reg = [] {
        TemplateRegistry r;
        constexpr std::string_view prefix = "templates/";
        for (const auto& f : embedded::files()) {
            if (!text::starts_with(f.name, prefix)) continue;
            auto parts = split_name(f.name.substr(prefix.size()));
            if (!parts) continue;
            r.add(parse_template(f.content, parts->first, parts->second));
        }
        return r;
    }();
    return reg;
}

TemplateRegistry TemplateRegistry::load(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) fail(ErrorCode::ConfigError, "template directory not found: " + dir.string());
    TemplateRegistry r;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto parts = split_name(entry.path().filename().string());
        if (!parts || !entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        if (!in) fail(ErrorCode::ConfigError, "cannot read template " + entry.path().string());
        std::ostringstream ss;
        ss << in.rdbuf();
        try {
            r.add(parse_template(ss.str(), parts->first, parts->second));
        } catch (const Error& e) {
            fail(ErrorCode::ConfigError, e.what());
        }
    }
    return r;
}

void TemplateRegistry::add(PromptTemplate t) {
    auto key = std::pair{dataset_key(t.dataset), t.category};
    templates_.insert_or_assign(std::move(key), std::move(t));
}

const PromptTemplate& TemplateRegistry::get(std::string_view dataset, std::string_view category) const {
    auto it = templates_.find({dataset_key(dataset), std::string(category)});
    if (it == templates_.end()) {
        fail(ErrorCode::UnknownTemplate,
             "no prompt template for (" + std::string(dataset) + ", " + std::string(category) + ")");
    }
    return it->second;
}

const PromptTemplate& TemplateRegistry::get(std::string_view dataset, MisalignmentType type) const {
    return get(dataset, to_string(type));
}

bool TemplateRegistry::contains(std::string_view dataset, std::string_view category) const {
    return templates_.count({dataset_key(dataset), std::string(category)}) != 0;
}

std::vector<std::pair<std::string, std::string>> TemplateRegistry::keys() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [k, _] : templates_) out.push_back(k);
    return out;
}

std::string substitute(std::string_view format, const PromptVars& vars) {
    std::string out;
    out.reserve(format.size());
    std::size_t i = 0;
    while (i < format.size()) {
        if (format[i] == '{') {
            const auto close = format.find('}', i + 1);
            if (close != std::string_view::npos) {
                auto it = vars.find(format.substr(i + 1, close - i - 1));
                if (it != vars.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(format[i++]);
    }
    return out;
}

std::string build_prompt(const PromptTemplate& t, std::string_view caption, const PromptVars& extra) {
    require(!text::is_blank(caption), "caption must be non-empty");
    PromptVars vars = extra;
    vars.insert_or_assign("caption", std::string(caption));
    if (t.category != kSummarizeCategory && t.category != kMergeCategory) {
        vars.insert_or_assign("category", std::string(prompt_label(parse_misalignment_type(t.category))));
    }
    std::string out = t.context_block;
    out += t.fewshot_block;
    out += substitute(t.tail_format, vars);
    return out;
}

std::string render_feedback_list(const std::vector<std::optional<std::string>>& feedbacks) {
    std::string out = "[";
    for (std::size_t i = 0; i < feedbacks.size(); ++i) {
        if (i > 0) out += ", ";
        out += feedbacks[i] ? nlohmann::json(*feedbacks[i]).dump() : std::string("NaN");
    }
    out += "]";
    return out;
}

} // namespace tvf::genpipe
