#include "tvf/clients/mock_backends.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "tvf/clients/http_client.hpp"
#include "tvf/core/text.hpp"
#include "tvf/error.hpp"

namespace tvf::clients {

using nlohmann::json;

namespace {

constexpr std::string_view kTypeLine = "Create a MISALIGNMENT of type:";

std::string str_at(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
        fail(ErrorCode::SchemaError, std::string("mock fixture entry lacks string '") + key + "'");
    }
    return it->get<std::string>();
}

const json& array_section(const json& j, const char* key) {
    static const json empty = json::array();
    auto it = j.find(key);
    if (it == j.end()) return empty;
    if (!it->is_array()) fail(ErrorCode::SchemaError, std::string("mock fixture '") + key + "' must be an array");
    return *it;
}

std::map<std::string, std::string> string_map(const json& j, const char* key) {
    std::map<std::string, std::string> out;
    auto it = j.find(key);
    if (it == j.end()) return out;
    if (!it->is_object()) fail(ErrorCode::SchemaError, std::string("mock fixture '") + key + "' must be an object");
    for (const auto& [k, v] : it->items()) {
        if (!v.is_string()) fail(ErrorCode::SchemaError, "mock fixture value for '" + k + "' must be a string");
        out.emplace(k, v.get<std::string>());
    }
    return out;
}

// Value of the last line starting with `key`, trimmed; nullopt if none.
std::optional<std::string> last_keyed_line(std::string_view prompt, std::string_view key) {
    std::optional<std::string> found;
    for (auto line : text::split(prompt, "\n")) {
        if (text::starts_with(line, key)) found = std::string(text::trim(line.substr(key.size())));
    }
    return found;
}

std::vector<std::string> parse_feedback_list(std::string_view raw) {
    std::string s(raw);
    // The prompt writes absent feedbacks as a bare NaN token.
    std::string rewritten;
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            rewritten.push_back(c);
            if (c == '\\' && i + 1 < s.size()) rewritten.push_back(s[++i]);
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        if (s.compare(i, 3, "NaN") == 0) {
            rewritten += "null";
            i += 2;
            continue;
        }
        rewritten.push_back(c);
    }
    std::vector<std::string> out;
    try {
        const json arr = json::parse(rewritten);
        if (!arr.is_array()) return out;
        for (const auto& v : arr) {
            if (v.is_string() && !text::is_blank(v.get<std::string>())) out.push_back(v.get<std::string>());
        }
    } catch (const json::exception&) {
        return out;
    }
    return out;
}

std::string first_sentence(std::string_view s) {
    const auto t = text::trim(s);
    const auto pos = t.find_first_of(".!?");
    if (pos == std::string_view::npos) return std::string(t) + ".";
    return std::string(t.substr(0, pos + 1));
}

} // namespace

std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string prompt_hash(std::string_view s) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(s)));
    return buf;
}

MockFixtures MockFixtures::from_json(const json& j) {
    if (!j.is_object()) fail(ErrorCode::SchemaError, "mock fixtures must be a JSON object");
    MockFixtures f;
    if (auto llm = j.find("llm"); llm != j.end()) {
        if (!llm->is_object()) fail(ErrorCode::SchemaError, "mock fixture 'llm' must be an object");
        f.llm_by_prompt_hash = string_map(*llm, "by_prompt_hash");
        f.llm_by_prompt = string_map(*llm, "by_prompt");
        for (const auto& e : array_section(*llm, "by_caption")) {
            const std::string kind = e.contains("kind") ? str_at(e, "kind") : std::string();
            f.llm_by_caption[{str_at(e, "caption"), kind}] = str_at(e, "response");
        }
    }
    for (const auto& e : array_section(j, "nli")) {
        auto it = e.find("entailment");
        if (it == e.end() || !it->is_number()) fail(ErrorCode::SchemaError, "nli fixture entry lacks 'entailment'");
        const double v = it->get<double>();
        if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::SchemaError, "nli fixture score outside [0,1]");
        f.nli[{str_at(e, "premise"), str_at(e, "hypothesis")}] = v;
    }
    for (const auto& e : array_section(j, "grounding")) {
        auto boxes_it = e.find("boxes");
        if (boxes_it == e.end()) fail(ErrorCode::SchemaError, "grounding fixture entry lacks 'boxes'");
        std::vector<PixelBox> boxes;
        try {
            boxes = boxes_from_output(json{{"boxes", *boxes_it}});
        } catch (const Error& err) {
            fail(ErrorCode::SchemaError, std::string("grounding fixture: ") + err.what());
        }
        f.grounding[{str_at(e, "image_uri"), str_at(e, "label")}] = std::move(boxes);
    }
    for (const auto& e : array_section(j, "vlm")) {
        f.vlm[{str_at(e, "image_uri"), str_at(e, "question")}] = str_at(e, "answer");
    }
    return f;
}

MockFixtures MockFixtures::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ConfigError, "cannot read mock fixtures " + path.string());
    try {
        return from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        fail(ErrorCode::ConfigError, "mock fixtures " + path.string() + ": " + e.what());
    }
}

void MockFixtures::merge(const MockFixtures& other) {
    auto over = [](auto& dst, const auto& src) {
        for (const auto& [k, v] : src) dst[k] = v;
    };
    over(llm_by_prompt_hash, other.llm_by_prompt_hash);
    over(llm_by_prompt, other.llm_by_prompt);
    over(llm_by_caption, other.llm_by_caption);
    over(nli, other.nli);
    over(grounding, other.grounding);
    over(vlm, other.vlm);
}

PromptKey inspect_prompt(std::string_view prompt) {
    PromptKey key;
    if (auto label = last_keyed_line(prompt, kTypeLine)) {
        key.label = *label;
        try {
            key.kind = std::string(to_string(parse_misalignment_type(*label)));
        } catch (const Error&) {
            key.kind.clear();
        }
        key.caption = last_keyed_line(prompt, "CAPTION:").value_or("");
        return key;
    }
    if (auto fb = last_keyed_line(prompt, "FEEDBACKS:")) {
        key.kind = "merge";
        key.caption = last_keyed_line(prompt, "CAPTION:").value_or("");
        key.feedbacks = parse_feedback_list(*fb);
        return key;
    }
    if (auto desc = last_keyed_line(prompt, "DESCRIPTION:")) {
        key.kind = "summarize";
        key.caption = *desc;
        return key;
    }
    key.caption = last_keyed_line(prompt, "CAPTION:").value_or("");
    return key;
}

std::string MockLlm::complete_chat(std::string_view prompt, const DecodingParams&) {
    require(!text::is_blank(prompt), "prompt must be non-empty");
    const std::string p(prompt);
    if (auto it = fixtures_.llm_by_prompt.find(p); it != fixtures_.llm_by_prompt.end()) return it->second;
    if (auto it = fixtures_.llm_by_prompt_hash.find(prompt_hash(p)); it != fixtures_.llm_by_prompt_hash.end()) {
        return it->second;
    }
    const PromptKey key = inspect_prompt(prompt);
    if (auto it = fixtures_.llm_by_caption.find({key.caption, key.kind}); it != fixtures_.llm_by_caption.end()) {
        return it->second;
    }
    if (auto it = fixtures_.llm_by_caption.find({key.caption, ""}); it != fixtures_.llm_by_caption.end()) {
        return it->second;
    }

    if (key.kind == "summarize") return "CAPTION: " + first_sentence(key.caption);
    if (key.kind == "merge") {
        const std::string fb = key.feedbacks.empty() ? std::string("no feedback") : key.feedbacks.front();
        return "MISALIGNMENT: " + fb + " (CAPTION: " + key.caption + ") (CONTRADICTION: " + fb + ")";
    }
    if (!key.label.empty()) {
        return "CONTRADICTION: " + key.caption + " in a different scene.\nMISALIGNMENT: The scene is as captioned (CAPTION: " +
               key.caption + "), not altered (CONTRADICTION: different scene)\nMISALIGNMENT TYPE: " + key.label;
    }
    return "OK";
}

double jaccard_similarity(std::string_view a, std::string_view b) {
    const auto ta = text::alnum_tokens(a);
    const auto tb = text::alnum_tokens(b);
    const std::set<std::string> sa(ta.begin(), ta.end());
    const std::set<std::string> sb(tb.begin(), tb.end());
    std::size_t inter = 0;
    for (const auto& t : sa) inter += sb.count(t);
    const std::size_t uni = sa.size() + sb.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double MockNli::score_entailment(std::string_view premise, std::string_view hypothesis) {
    require(!text::is_blank(premise) && !text::is_blank(hypothesis), "premise and hypothesis must be non-empty");
    if (auto it = fixtures_.nli.find({std::string(premise), std::string(hypothesis)}); it != fixtures_.nli.end()) {
        return it->second;
    }
    if (text::normalize_sentence(premise) == text::normalize_sentence(hypothesis)) return 1.0;
    return jaccard_similarity(premise, hypothesis);
}

std::vector<PixelBox> MockGrounding::detect_grounded_boxes(const ImageRef& image, std::string_view label) {
    require(!text::is_blank(label), "grounding label must be non-empty");
    auto it = fixtures_.grounding.find({image.uri, std::string(label)});
    if (it == fixtures_.grounding.end() || it->second.empty()) {
        fail(ErrorCode::NoDetection, "no box for '" + std::string(label) + "' in " + image.uri);
    }
    return it->second;
}

std::string MockVlm::query_vlm(const ImageRef& image, std::string_view question) {
    require(!text::is_blank(question), "question must be non-empty");
    auto it = fixtures_.vlm.find({image.uri, std::string(question)});
    return it == fixtures_.vlm.end() ? std::string() : it->second;
}

} // namespace tvf::clients
