#include "tvf/dataset/config.hpp"

#include <fstream>
#include <initializer_list>

#include "tvf/core/records_json.hpp"
#include "tvf/error.hpp"

namespace tvf::dataset {

namespace {

using json_io::Json;

[[noreturn]] void config_error(const std::string& msg) {
    fail(ErrorCode::ConfigError, msg);
}

void check_keys(const Json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) config_error(std::string(where) + " must be an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) config_error("unknown key '" + key + "' in " + std::string(where));
    }
}

double number(const Json& j, const char* key, std::string_view where) {
    const Json& v = j.at(key);
    if (!v.is_number()) config_error(std::string(where) + "." + key + " must be a number");
    return v.get<double>();
}

long long integer(const Json& j, const char* key, std::string_view where) {
    const Json& v = j.at(key);
    if (!v.is_number_integer()) config_error(std::string(where) + "." + key + " must be an integer");
    return v.get<long long>();
}

std::string string(const Json& j, const char* key, std::string_view where) {
    const Json& v = j.at(key);
    if (!v.is_string()) config_error(std::string(where) + "." + key + " must be a string");
    return v.get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base.empty() ? base / path : path;
}

clients::BackendConfig parse_backend(clients::Role role, const Json& j) {
    const std::string where = "backends." + std::string(clients::to_string(role));
    check_keys(j, where, {"endpoint_url", "auth_token", "timeout_ms", "max_in_flight", "retries"});
    clients::BackendConfig c;
    c.role = role;
    if (j.contains("endpoint_url")) c.endpoint_url = string(j, "endpoint_url", where);
    if (j.contains("auth_token")) c.auth_token = string(j, "auth_token", where);
    if (j.contains("timeout_ms")) c.timeout_ms = static_cast<int>(integer(j, "timeout_ms", where));
    if (j.contains("max_in_flight")) c.max_in_flight = static_cast<int>(integer(j, "max_in_flight", where));
    if (j.contains("retries")) c.retries = static_cast<int>(integer(j, "retries", where));
    return c;
}

template <typename T>
T& need(const std::shared_ptr<T>& p, clients::Role role) {
    if (!p) {
        config_error("no " + std::string(clients::to_string(role)) + " backend configured (set backends." +
                     std::string(clients::to_string(role)) + ".endpoint_url or " +
                     clients::endpoint_env_var(role) + ")");
    }
    return *p;
}

} // namespace

PipelineConfig PipelineConfig::from_json(const Json& j, const std::filesystem::path& base_dir) {
    check_keys(j, "config",
               {"backends", "mock_fixtures", "thresholds", "decoding", "sampling_seed", "grounding", "queries",
                "concurrency", "generation", "templates_dir", "lexicon_dir"});
    PipelineConfig c;
    if (j.contains("backends")) {
        const Json& b = j.at("backends");
        check_keys(b, "backends", {"llm", "nli", "grounding", "vlm", "tagger"});
        for (const auto& [name, value] : b.items()) {
            const auto role = clients::parse_role(name);
            c.backends[role] = parse_backend(role, value);
        }
    }
    if (j.contains("mock_fixtures")) {
        const Json& m = j.at("mock_fixtures");
        if (!m.is_array()) config_error("mock_fixtures must be an array of paths");
        for (const auto& p : m) {
            if (!p.is_string()) config_error("mock_fixtures entries must be strings");
            c.mock_fixtures.push_back(resolve(base_dir, p.get<std::string>()));
        }
    }
    if (j.contains("thresholds")) {
        const Json& t = j.at("thresholds");
        check_keys(t, "thresholds", {"tau_c", "tau_f"});
        if (t.contains("tau_c")) c.thresholds.contradiction = number(t, "tau_c", "thresholds");
        if (t.contains("tau_f")) c.thresholds.feedback = number(t, "tau_f", "thresholds");
    }
    if (j.contains("decoding")) {
        const Json& d = j.at("decoding");
        check_keys(d, "decoding", {"temperature", "max_tokens", "top_p", "top_k"});
        if (d.contains("temperature")) c.decoding.temperature = number(d, "temperature", "decoding");
        if (d.contains("max_tokens")) c.decoding.max_tokens = static_cast<int>(integer(d, "max_tokens", "decoding"));
        if (d.contains("top_p")) c.decoding.top_p = number(d, "top_p", "decoding");
        if (d.contains("top_k")) c.decoding.top_k = static_cast<int>(integer(d, "top_k", "decoding"));
    }
    if (j.contains("sampling_seed")) {
        const Json& s = j.at("sampling_seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
            config_error("sampling_seed must be a non-negative integer");
        }
        c.sampling_seed = s.get<std::uint64_t>();
    }
    if (j.contains("grounding")) {
        const Json& g = j.at("grounding");
        check_keys(g, "grounding", {"max_boxes", "min_conf"});
        if (g.contains("max_boxes")) c.grounding.max_boxes = static_cast<int>(integer(g, "max_boxes", "grounding"));
        if (g.contains("min_conf")) c.grounding.min_conf = number(g, "min_conf", "grounding");
    }
    if (j.contains("queries")) {
        const Json& q = j.at("queries");
        check_keys(q, "queries", {"binary", "feedback"});
        if (q.contains("binary")) c.queries.binary = string(q, "binary", "queries");
        if (q.contains("feedback")) c.queries.feedback = string(q, "feedback", "queries");
    }
    if (j.contains("concurrency")) {
        const Json& cc = j.at("concurrency");
        check_keys(cc, "concurrency", {"workers"});
        if (cc.contains("workers")) c.workers = static_cast<int>(integer(cc, "workers", "concurrency"));
    }
    if (j.contains("generation")) {
        const Json& g = j.at("generation");
        check_keys(g, "generation", {"retries", "negatives_per_pair"});
        if (g.contains("retries")) c.generation_retries = static_cast<int>(integer(g, "retries", "generation"));
        if (g.contains("negatives_per_pair")) {
            c.negatives_per_pair = static_cast<int>(integer(g, "negatives_per_pair", "generation"));
        }
    }
    if (j.contains("templates_dir")) c.templates_dir = resolve(base_dir, string(j, "templates_dir", "config"));
    if (j.contains("lexicon_dir")) c.lexicon_dir = resolve(base_dir, string(j, "lexicon_dir", "config"));
    c.validate();
    return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot read config " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        config_error("config " + path.string() + ": " + e.what());
    }
    return from_json(j, path.parent_path());
}

void PipelineConfig::validate() const {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(thresholds.contradiction) || !unit(thresholds.feedback)) config_error("thresholds must lie in [0,1]");
    if (!unit(grounding.min_conf)) config_error("grounding.min_conf must lie in [0,1]");
    if (grounding.max_boxes < 1) config_error("grounding.max_boxes must be at least 1");
    if (workers < 1) config_error("concurrency.workers must be at least 1");
    if (generation_retries < 0) config_error("generation.retries must be non-negative");
    if (negatives_per_pair < 1) config_error("generation.negatives_per_pair must be at least 1");
    if (decoding.max_tokens < 1) config_error("decoding.max_tokens must be at least 1");
    if (decoding.temperature < 0.0) config_error("decoding.temperature must be non-negative");
    if (!(decoding.top_p > 0.0 && decoding.top_p <= 1.0)) config_error("decoding.top_p must lie in (0,1]");
    if (decoding.top_k < 0) config_error("decoding.top_k must be non-negative");
    if (queries.binary.find("{text}") == std::string::npos || queries.feedback.find("{text}") == std::string::npos) {
        config_error("queries must contain {text}");
    }
}

Backends Backends::from_config(const PipelineConfig& config) {
    clients::MockFixtures fixtures;
    bool fixtures_loaded = false;
    auto mock_fixtures = [&]() -> const clients::MockFixtures& {
        if (!fixtures_loaded) {
            for (const auto& p : config.mock_fixtures) fixtures.merge(clients::MockFixtures::load(p));
            fixtures_loaded = true;
        }
        return fixtures;
    };
    auto transport = std::make_shared<clients::HttplibTransport>();

    Backends out;
    for (const auto role : {clients::Role::llm, clients::Role::nli, clients::Role::grounding, clients::Role::vlm,
                            clients::Role::tagger}) {
        clients::BackendConfig bc;
        if (auto it = config.backends.find(role); it != config.backends.end()) bc = it->second;
        bc.role = role;
        clients::apply_env_override(bc);
        const std::string& url = bc.endpoint_url;
        if (url.empty()) {
            if (role == clients::Role::tagger) {
                const auto& lex = config.lexicon_dir ? candidates::Lexicon::load(*config.lexicon_dir)
                                                     : candidates::Lexicon::builtin();
                out.tagger_ = std::make_shared<candidates::LexiconTagger>(lex);
            }
            continue;
        }
        if (url == kBuiltinEndpoint) {
            if (role != clients::Role::tagger) config_error("'builtin' is only available for the tagger");
            const auto& lex = config.lexicon_dir ? candidates::Lexicon::load(*config.lexicon_dir)
                                                 : candidates::Lexicon::builtin();
            out.tagger_ = std::make_shared<candidates::LexiconTagger>(lex);
            continue;
        }
        if (url == kMockEndpoint) {
            switch (role) {
                case clients::Role::llm:       out.llm_ = std::make_shared<clients::MockLlm>(mock_fixtures()); break;
                case clients::Role::nli:       out.nli_ = std::make_shared<clients::MockNli>(mock_fixtures()); break;
                case clients::Role::grounding: out.grounding_ = std::make_shared<clients::MockGrounding>(mock_fixtures()); break;
                case clients::Role::vlm:       out.vlm_ = std::make_shared<clients::MockVlm>(mock_fixtures()); break;
                case clients::Role::tagger:    config_error("no mock tagger; use 'builtin'");
            }
            continue;
        }
        auto client = std::make_shared<clients::BackendClient>(bc, transport);
        switch (role) {
            case clients::Role::llm:       out.llm_ = std::make_shared<clients::HttpLlmBackend>(client); break;
            case clients::Role::nli:       out.nli_ = std::make_shared<clients::HttpNliBackend>(client); break;
            case clients::Role::grounding: out.grounding_ = std::make_shared<clients::HttpGroundingBackend>(client); break;
            case clients::Role::vlm:       out.vlm_ = std::make_shared<clients::HttpVlmBackend>(client); break;
            case clients::Role::tagger:    out.tagger_ = std::make_shared<clients::HttpTaggerBackend>(client); break;
        }
    }
    return out;
}

LlmBackend& Backends::llm() const { return need(llm_, clients::Role::llm); }
NliBackend& Backends::nli() const { return need(nli_, clients::Role::nli); }
GroundingBackend& Backends::grounding() const { return need(grounding_, clients::Role::grounding); }
VlmBackend& Backends::vlm() const { return need(vlm_, clients::Role::vlm); }
TaggerBackend& Backends::tagger() const { return need(tagger_, clients::Role::tagger); }

Resources Resources::from_config(const PipelineConfig& config) {
    Resources r;
    if (config.templates_dir) {
        // Files in the directory override the built-in templates of the same key.
        auto reg = std::make_shared<genpipe::TemplateRegistry>(genpipe::TemplateRegistry::builtin());
        const auto loaded = genpipe::TemplateRegistry::load(*config.templates_dir);
        for (const auto& [dataset, category] : loaded.keys()) reg->add(loaded.get(dataset, category));
        r.templates = std::move(reg);
    } else {
        r.templates = std::shared_ptr<const genpipe::TemplateRegistry>(&genpipe::TemplateRegistry::builtin(),
                                                                       [](const genpipe::TemplateRegistry*) {});
    }
    if (config.lexicon_dir) {
        r.lexicon = std::make_shared<const candidates::Lexicon>(candidates::Lexicon::load(*config.lexicon_dir));
    } else {
        r.lexicon = std::shared_ptr<const candidates::Lexicon>(&candidates::Lexicon::builtin(),
                                                               [](const candidates::Lexicon*) {});
    }
    return r;
}

} // namespace tvf::dataset
