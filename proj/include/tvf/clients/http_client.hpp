#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tvf/clients/backends.hpp"

namespace tvf::clients {

enum class Role { llm, nli, grounding, vlm, tagger };

[[nodiscard]] std::string_view to_string(Role r) noexcept;
[[nodiscard]] Role parse_role(std::string_view s);

/// Environment variable that overrides the endpoint for a role (MQ_LLM_URL, ...).
[[nodiscard]] const char* endpoint_env_var(Role r) noexcept;

struct BackendConfig {
    Role role = Role::llm;
    std::string endpoint_url;
    std::optional<std::string> auth_token;
    int timeout_ms = 30000;
    int max_in_flight = 4;
    int retries = 2;

    /// Throws ConfigError when a bound is violated.
    void validate() const;
};

/// Replaces endpoint_url with the role's environment override when set.
void apply_env_override(BackendConfig& config);

struct HttpResponse {
    int status = 0;
    std::string body;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

// One HTTP POST. Implementations throw Error(BackendUnavailable) when the
// endpoint cannot be reached and Error(Timeout) when it does not answer in time.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse post(const std::string& url, const std::string& body, const Headers& headers,
                              std::chrono::milliseconds timeout) = 0;
};

class HttplibTransport final : public Transport {
public:
    HttpResponse post(const std::string& url, const std::string& body, const Headers& headers,
                      std::chrono::milliseconds timeout) override;
};

struct ParsedUrl {
    std::string host;
    int port = 80;
    std::string path = "/";
};

/// Accepts http://host[:port][/path]. Throws ConfigError otherwise.
[[nodiscard]] ParsedUrl parse_http_url(const std::string& url);

struct RetryPolicy {
    std::chrono::milliseconds base_backoff{100};
    std::chrono::milliseconds max_backoff{5000};
    std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for

    [[nodiscard]] std::chrono::milliseconds backoff_for(int attempt) const;
};

// Speaks the JSON envelope shared by every role:
//   request  {"role": ..., "inputs": {...}, "params": {...}}
//   response {"output": ..., "error": null | {"code": ..., "message": ...}}
// At most max_in_flight requests are outstanding at once; connection errors,
// timeouts, 5xx and rate limiting are retried with exponential backoff.
class BackendClient {
public:
    BackendClient(BackendConfig config, std::shared_ptr<Transport> transport,
                  RetryPolicy retry = {});

    [[nodiscard]] nlohmann::json call(const nlohmann::json& inputs,
                                      const nlohmann::json& params = nlohmann::json::object());

    [[nodiscard]] const BackendConfig& config() const noexcept { return config_; }

private:
    BackendConfig config_;
    std::shared_ptr<Transport> transport_;
    RetryPolicy retry_;
    std::counting_semaphore<> in_flight_;
};

[[nodiscard]] nlohmann::json to_json(const DecodingParams& p);

class HttpLlmBackend final : public LlmBackend {
public:
    explicit HttpLlmBackend(std::shared_ptr<BackendClient> client) : client_(std::move(client)) {}
    std::string complete_chat(std::string_view prompt, const DecodingParams& params) override;

private:
    std::shared_ptr<BackendClient> client_;
};

class HttpNliBackend final : public NliBackend {
public:
    explicit HttpNliBackend(std::shared_ptr<BackendClient> client) : client_(std::move(client)) {}
    double score_entailment(std::string_view premise, std::string_view hypothesis) override;

private:
    std::shared_ptr<BackendClient> client_;
};

class HttpGroundingBackend final : public GroundingBackend {
public:
    explicit HttpGroundingBackend(std::shared_ptr<BackendClient> client) : client_(std::move(client)) {}
    std::vector<PixelBox> detect_grounded_boxes(const ImageRef& image, std::string_view label) override;

private:
    std::shared_ptr<BackendClient> client_;
};

class HttpVlmBackend final : public VlmBackend {
public:
    explicit HttpVlmBackend(std::shared_ptr<BackendClient> client) : client_(std::move(client)) {}
    std::string query_vlm(const ImageRef& image, std::string_view question) override;

private:
    std::shared_ptr<BackendClient> client_;
};

class HttpTaggerBackend final : public TaggerBackend {
public:
    explicit HttpTaggerBackend(std::shared_ptr<BackendClient> client) : client_(std::move(client)) {}
    std::vector<TaggedToken> tag(std::string_view caption) override;

private:
    std::shared_ptr<BackendClient> client_;
};

// Output decoding shared by the HTTP backends and the mock server.
[[nodiscard]] double entailment_from_output(const nlohmann::json& output);
[[nodiscard]] std::vector<PixelBox> boxes_from_output(const nlohmann::json& output);
[[nodiscard]] nlohmann::json boxes_to_output(const std::vector<PixelBox>& boxes);

} // namespace tvf::clients
