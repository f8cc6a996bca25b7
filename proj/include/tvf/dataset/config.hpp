#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tvf/candidates/tagger.hpp"
#include "tvf/clients/backends.hpp"
#include "tvf/clients/http_client.hpp"
#include "tvf/clients/mock_backends.hpp"
#include "tvf/eval/harness.hpp"
#include "tvf/genpipe/templates.hpp"
#include "tvf/grounder/grounder.hpp"
#include "tvf/validator/validator.hpp"

namespace tvf::dataset {

// Endpoint value selecting the offline mock for a role.
inline constexpr std::string_view kMockEndpoint = "mock";
// Endpoint value selecting the built-in lexicon tagger.
inline constexpr std::string_view kBuiltinEndpoint = "builtin";

// JSON config; every key is optional and unknown keys are rejected:
// {
//   "backends": {"llm": {"endpoint_url", "auth_token", "timeout_ms", "max_in_flight", "retries"},
//                "nli": {...}, "grounding": {...}, "vlm": {...}, "tagger": {...}},
//   "mock_fixtures": ["fixtures.json", ...],
//   "thresholds": {"tau_c": 0.25, "tau_f": 0.75},
//   "decoding": {"temperature": 0.4, "max_tokens": 700, "top_p": 0.95, "top_k": 30},
//   "sampling_seed": 0,
//   "grounding": {"max_boxes": 1, "min_conf": 0.35},
//   "queries": {"binary": "...{text}...", "feedback": "...{text}..."},
//   "concurrency": {"workers": 1},
//   "generation": {"retries": 2, "negatives_per_pair": 1},
//   "templates_dir": "...", "lexicon_dir": "..."
// }
// Relative paths resolve against the config file's directory.
struct PipelineConfig {
    std::map<clients::Role, clients::BackendConfig> backends;
    std::vector<std::filesystem::path> mock_fixtures;
    validator::Thresholds thresholds{};
    DecodingParams decoding{};
    std::uint64_t sampling_seed = 0;
    grounder::GroundingOptions grounding{};
    eval::EvalQueries queries{};
    int workers = 1;
    int generation_retries = 2;
    int negatives_per_pair = 1;
    std::optional<std::filesystem::path> templates_dir;
    std::optional<std::filesystem::path> lexicon_dir;

    /// Throws ConfigError.
    static PipelineConfig from_json(const nlohmann::ordered_json& j, const std::filesystem::path& base_dir = {});
    static PipelineConfig load(const std::filesystem::path& path);

    /// Throws ConfigError when a bound is violated.
    void validate() const;
};

// The backends a run needs, built from the config. Roles without a configured
// endpoint (after environment overrides) stay null; the accessors throw
// ConfigError naming the missing role.
class Backends {
public:
    static Backends from_config(const PipelineConfig& config);

    [[nodiscard]] LlmBackend& llm() const;
    [[nodiscard]] NliBackend& nli() const;
    [[nodiscard]] GroundingBackend& grounding() const;
    [[nodiscard]] VlmBackend& vlm() const;
    [[nodiscard]] TaggerBackend& tagger() const;
    [[nodiscard]] GroundingBackend* grounding_or_null() const noexcept { return grounding_.get(); }

    std::shared_ptr<LlmBackend> llm_;
    std::shared_ptr<NliBackend> nli_;
    std::shared_ptr<GroundingBackend> grounding_;
    std::shared_ptr<VlmBackend> vlm_;
    std::shared_ptr<TaggerBackend> tagger_;
};

// Templates and lexicon named by the config, or the built-in ones.
struct Resources {
    std::shared_ptr<const genpipe::TemplateRegistry> templates;
    std::shared_ptr<const candidates::Lexicon> lexicon;

    static Resources from_config(const PipelineConfig& config);
};

} // namespace tvf::dataset
