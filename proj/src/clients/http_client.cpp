#include "tvf/clients/http_client.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "tvf/core/text.hpp"
#include "tvf/error.hpp"

namespace tvf::clients {

using nlohmann::json;

namespace {

// Releases an in-flight slot on scope exit.
class SlotGuard {
public:
    explicit SlotGuard(std::counting_semaphore<>& sem) : sem_(sem) { sem_.acquire(); }
    ~SlotGuard() { sem_.release(); }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;

private:
    std::counting_semaphore<>& sem_;
};

bool retryable_error_code(std::string_view code) {
    return code == "rate_limited" || code == "unavailable" || code == "timeout";
}

ErrorCode map_error_code(std::string_view code) {
    if (code == "rate_limited") return ErrorCode::RateLimited;
    if (code == "timeout") return ErrorCode::Timeout;
    if (code == "no_detection") return ErrorCode::NoDetection;
    if (code == "invalid_argument") return ErrorCode::InvalidArgument;
    return ErrorCode::BackendUnavailable;
}

std::string require_string(const json& j, const char* what) {
    if (!j.is_string()) fail(ErrorCode::BackendUnavailable, std::string("malformed backend output: ") + what);
    return j.get<std::string>();
}

} // namespace

std::string_view to_string(Role r) noexcept {
    switch (r) {
        case Role::llm:       return "llm";
        case Role::nli:       return "nli";
        case Role::grounding: return "grounding";
        case Role::vlm:       return "vlm";
        case Role::tagger:    return "tagger";
    }
    return "llm";
}

Role parse_role(std::string_view s) {
    if (s == "llm") return Role::llm;
    if (s == "nli") return Role::nli;
    if (s == "grounding") return Role::grounding;
    if (s == "vlm") return Role::vlm;
    if (s == "tagger") return Role::tagger;
    fail(ErrorCode::ConfigError, "unknown backend role '" + std::string(s) + "'");
}

const char* endpoint_env_var(Role r) noexcept {
    switch (r) {
        case Role::llm:       return "MQ_LLM_URL";
        case Role::nli:       return "MQ_NLI_URL";
        case Role::grounding: return "MQ_GROUND_URL";
        case Role::vlm:       return "MQ_VLM_URL";
        case Role::tagger:    return "MQ_TAGGER_URL";
    }
    return "MQ_LLM_URL";
}

void BackendConfig::validate() const {
    if (max_in_flight < 1) fail(ErrorCode::ConfigError, "max_in_flight must be >= 1");
    if (timeout_ms < 1) fail(ErrorCode::ConfigError, "timeout_ms must be >= 1");
    if (retries < 0) fail(ErrorCode::ConfigError, "retries must be >= 0");
    if (text::is_blank(endpoint_url)) fail(ErrorCode::ConfigError, "endpoint_url must be set");
}

void apply_env_override(BackendConfig& config) {
    if (const char* v = std::getenv(endpoint_env_var(config.role)); v != nullptr && *v != '\0') {
        config.endpoint_url = v;
    }
}

ParsedUrl parse_http_url(const std::string& url) {
    constexpr std::string_view scheme = "http://";
    if (!text::starts_with(url, scheme)) {
        fail(ErrorCode::ConfigError, "only http:// endpoints are supported: '" + url + "'");
    }
    std::string_view rest = std::string_view(url).substr(scheme.size());
    ParsedUrl out;
    const auto slash = rest.find('/');
    std::string_view authority = rest.substr(0, slash);
    if (slash != std::string_view::npos) out.path = std::string(rest.substr(slash));
    const auto colon = authority.rfind(':');
    if (colon != std::string_view::npos) {
        const std::string port(authority.substr(colon + 1));
        char* end = nullptr;
        const long p = std::strtol(port.c_str(), &end, 10);
        if (port.empty() || *end != '\0' || p <= 0 || p > 65535) {
            fail(ErrorCode::ConfigError, "bad port in '" + url + "'");
        }
        out.port = static_cast<int>(p);
        authority = authority.substr(0, colon);
    }
    if (authority.empty()) fail(ErrorCode::ConfigError, "missing host in '" + url + "'");
    out.host = std::string(authority);
    return out;
}

HttpResponse HttplibTransport::post(const std::string& url, const std::string& body,
                                    const Headers& headers, std::chrono::milliseconds timeout) {
    const ParsedUrl u = parse_http_url(url);
    httplib::Client cli(u.host, u.port);
    const auto secs = static_cast<time_t>(timeout.count() / 1000);
    const auto usecs = static_cast<time_t>((timeout.count() % 1000) * 1000);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = cli.Post(u.path, h, body, "application/json");
    if (!res) {
        const auto err = res.error();
        const std::string what = httplib::to_string(err);
        if (err == httplib::Error::Read || err == httplib::Error::Write ||
            err == httplib::Error::ConnectionTimeout) {
            fail(ErrorCode::Timeout, "request to " + url + " timed out (" + what + ")");
        }
        fail(ErrorCode::BackendUnavailable, "cannot reach " + url + " (" + what + ")");
    }
    return HttpResponse{res->status, res->body};
}

std::chrono::milliseconds RetryPolicy::backoff_for(int attempt) const {
    auto d = base_backoff;
    for (int i = 0; i < attempt && d < max_backoff; ++i) d *= 2;
    return std::min(d, max_backoff);
}

BackendClient::BackendClient(BackendConfig config, std::shared_ptr<Transport> transport, RetryPolicy retry)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      retry_(std::move(retry)),
      in_flight_(std::max(1, config_.max_in_flight)) {
    config_.validate();
    if (!retry_.sleep) {
        retry_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    }
}

json BackendClient::call(const json& inputs, const json& params) {
    json envelope = json::object();
    envelope["role"] = std::string(to_string(config_.role));
    envelope["inputs"] = inputs;
    envelope["params"] = params;
    const std::string body = envelope.dump();

    Headers headers;
    if (config_.auth_token) headers.emplace_back("Authorization", "Bearer " + *config_.auth_token);

    std::optional<Error> last;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        if (attempt > 0) retry_.sleep(retry_.backoff_for(attempt - 1));
        HttpResponse resp;
        try {
            SlotGuard slot(in_flight_);
            resp = transport_->post(config_.endpoint_url, body, headers,
                                    std::chrono::milliseconds(config_.timeout_ms));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::BackendUnavailable && e.code() != ErrorCode::Timeout) throw;
            last = e;
            continue;
        }

        if (resp.status == 429) {
            last = Error(ErrorCode::RateLimited, config_.endpoint_url + " is rate limiting");
            continue;
        }
        if (resp.status >= 500) {
            last = Error(ErrorCode::BackendUnavailable,
                         config_.endpoint_url + " answered HTTP " + std::to_string(resp.status));
            continue;
        }

        json reply;
        try {
            reply = json::parse(resp.body);
        } catch (const json::parse_error&) {
            fail(ErrorCode::BackendUnavailable, "malformed JSON from " + config_.endpoint_url);
        }
        if (!reply.is_object()) fail(ErrorCode::BackendUnavailable, "malformed JSON from " + config_.endpoint_url);

        if (auto it = reply.find("error"); it != reply.end() && !it->is_null()) {
            const std::string code = it->value("code", std::string("unavailable"));
            const std::string message = it->value("message", std::string());
            Error err(map_error_code(code), config_.endpoint_url + ": " + code + ": " + message);
            if (!retryable_error_code(code)) throw err;
            last = err;
            continue;
        }
        if (resp.status >= 400) {
            fail(ErrorCode::InvalidArgument,
                 config_.endpoint_url + " rejected the request with HTTP " + std::to_string(resp.status));
        }
        auto out = reply.find("output");
        if (out == reply.end()) fail(ErrorCode::BackendUnavailable, "response lacks 'output'");
        return *out;
    }
    throw *last;
}

json to_json(const DecodingParams& p) {
    return json{{"temperature", p.temperature}, {"max_tokens", p.max_tokens}, {"top_p", p.top_p}, {"top_k", p.top_k}};
}

std::string HttpLlmBackend::complete_chat(std::string_view prompt, const DecodingParams& params) {
    require(!text::is_blank(prompt), "prompt must be non-empty");
    const json out = client_->call(json{{"prompt", std::string(prompt)}}, to_json(params));
    return require_string(out, "llm output must be a string");
}

double entailment_from_output(const json& output) {
    const json* v = nullptr;
    if (output.is_object()) {
        if (auto it = output.find("entailment"); it != output.end()) v = &*it;
        else if (auto e = output.find("entail"); e != output.end()) v = &*e;
    }
    if (v == nullptr || !v->is_number()) fail(ErrorCode::BackendUnavailable, "nli output lacks 'entailment'");
    const double score = v->get<double>();
    if (!(score >= 0.0 && score <= 1.0)) fail(ErrorCode::BackendUnavailable, "nli score outside [0,1]");
    return score;
}

double HttpNliBackend::score_entailment(std::string_view premise, std::string_view hypothesis) {
    require(!text::is_blank(premise) && !text::is_blank(hypothesis), "premise and hypothesis must be non-empty");
    return entailment_from_output(
        client_->call(json{{"premise", std::string(premise)}, {"hypothesis", std::string(hypothesis)}}));
}

std::vector<PixelBox> boxes_from_output(const json& output) {
    if (!output.is_object() || !output.contains("boxes") || !output["boxes"].is_array()) {
        fail(ErrorCode::BackendUnavailable, "grounding output lacks 'boxes'");
    }
    std::vector<PixelBox> boxes;
    for (const auto& b : output["boxes"]) {
        if (!b.is_object()) fail(ErrorCode::BackendUnavailable, "malformed grounding box");
        try {
            boxes.push_back(PixelBox{b.at("x1").get<double>(), b.at("y1").get<double>(), b.at("x2").get<double>(),
                                     b.at("y2").get<double>(), b.at("confidence").get<double>()});
        } catch (const json::exception&) {
            fail(ErrorCode::BackendUnavailable, "malformed grounding box");
        }
    }
    return boxes;
}

json boxes_to_output(const std::vector<PixelBox>& boxes) {
    json arr = json::array();
    for (const auto& b : boxes) {
        arr.push_back(json{{"x1", b.x1}, {"y1", b.y1}, {"x2", b.x2}, {"y2", b.y2}, {"confidence", b.confidence}});
    }
    return json{{"boxes", std::move(arr)}};
}

std::vector<PixelBox> HttpGroundingBackend::detect_grounded_boxes(const ImageRef& image, std::string_view label) {
    require(!text::is_blank(label), "grounding label must be non-empty");
    auto boxes = boxes_from_output(
        client_->call(json{{"image_uri", image.uri}, {"label", std::string(label)}}));
    if (boxes.empty()) fail(ErrorCode::NoDetection, "no box for label '" + std::string(label) + "'");
    return boxes;
}

std::string HttpVlmBackend::query_vlm(const ImageRef& image, std::string_view question) {
    require(!text::is_blank(question), "question must be non-empty");
    const json out = client_->call(json{{"image_uri", image.uri}, {"question", std::string(question)}});
    if (!out.is_object() || !out.contains("answer")) fail(ErrorCode::BackendUnavailable, "vlm output lacks 'answer'");
    return require_string(out["answer"], "vlm answer must be a string");
}

std::vector<TaggedToken> HttpTaggerBackend::tag(std::string_view caption) {
    const json out = client_->call(json{{"text", std::string(caption)}});
    if (!out.is_object() || !out.contains("tokens") || !out["tokens"].is_array()) {
        fail(ErrorCode::BackendUnavailable, "tagger output lacks 'tokens'");
    }
    std::vector<TaggedToken> tokens;
    for (const auto& t : out["tokens"]) {
        try {
            tokens.push_back(TaggedToken{t.at("text").get<std::string>(),
                                         parse_part_of_speech(t.at("pos").get<std::string>()),
                                         t.at("start").get<std::size_t>(), t.at("end").get<std::size_t>()});
        } catch (const json::exception&) {
            fail(ErrorCode::BackendUnavailable, "malformed tagger token");
        }
    }
    return tokens;
}

} // namespace tvf::clients
