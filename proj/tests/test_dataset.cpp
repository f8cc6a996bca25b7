#include <doctest.h>

#include <fstream>
#include <sstream>

#include "test_support.hpp"
#include "tvf/clients/mock_backends.hpp"
#include "tvf/core/records_json.hpp"
#include "tvf/dataset/config.hpp"
#include "tvf/dataset/manifest.hpp"
#include "tvf/dataset/pipeline.hpp"

using namespace tvf;
using namespace tvf::dataset;
using tvf::testing::code_of;
using Json = nlohmann::ordered_json;

namespace {

long error_line(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.line();
    }
    return -1;
}

std::vector<AlignedPair> e2e_pairs() {
    std::ifstream in(testing::fixture("e2e/pairs.jsonl"));
    REQUIRE(in);
    return json_io::read_aligned_pairs(in);
}

struct E2e {
    PipelineConfig config = PipelineConfig::load(testing::fixture("e2e/config.json"));
    Backends backends = Backends::from_config(config);

    PipelineBackends ptrs() const {
        return {&backends.llm(), &backends.nli(), &backends.grounding(), &backends.tagger()};
    }
    PipelineOptions options(int workers) const {
        PipelineOptions o;
        o.sampling_seed = config.sampling_seed;
        o.workers = workers;
        o.thresholds = config.thresholds;
        o.grounding = config.grounding;
        o.generation.retries = config.generation_retries;
        return o;
    }
};

std::string jsonl(const std::vector<TrainingRecord>& records) {
    std::ostringstream out;
    json_io::write_jsonl(out, records);
    return out.str();
}

} // namespace

TEST_CASE("manifest with human captions") {
    std::istringstream in(
        R"({"dataset_name": "COCO", "caption_style": "human_multi"})"
        "\n"
        R"({"id": "a", "image": {"uri": "x.jpg", "width_px": 10, "height_px": 20}, "captions": ["short", "the longest one", "mid one"]})"
        "\n\n");
    const auto m = read_manifest(in);
    CHECK(m.dataset_name == "COCO");
    REQUIRE(m.records.size() == 1);
    const auto pairs = ingest(m, nullptr);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].caption == "the longest one");
    CHECK(pairs[0].caption_provenance == CaptionProvenance::human_annotated);
    CHECK(pairs[0].source_dataset == "COCO");
    CHECK(pairs[0].image.width_px == 10);
}

TEST_CASE("manifest with predicted captions keeps the image kind") {
    std::istringstream in(
        R"({"dataset_name": "PickaPic", "caption_style": "predicted"})"
        "\n"
        R"({"id": "a", "image": {"uri": "x.png", "width_px": 512, "height_px": 512, "kind": "synthetic"}, "caption": "A cat."})"
        "\n");
    const auto pairs = ingest(read_manifest(in), nullptr);
    CHECK(pairs[0].caption == "A cat.");
    CHECK(pairs[0].caption_provenance == CaptionProvenance::model_predicted);
    CHECK(pairs[0].image.kind == ImageKind::synthetic);
    CHECK(default_image_kind("ImageReward") == ImageKind::synthetic);
    CHECK(default_image_kind("ADE20k") == ImageKind::natural);
}

TEST_CASE("narratives go through the summarizer") {
    std::istringstream in(
        R"({"dataset_name": "ADE20k", "caption_style": "localized_narrative"})"
        "\n"
        R"({"id": "n1", "image": {"uri": "x.jpg", "width_px": 4, "height_px": 4}, "narrative": "In this image we can see a wall. There is a beam."})"
        "\n");
    const auto m = read_manifest(in);
    CHECK(code_of([&] { (void)ingest(m, nullptr); }) == ErrorCode::ConfigError);
    clients::MockLlm llm;
    const auto pairs = ingest(m, &llm);
    CHECK(pairs[0].caption == "In this image we can see a wall.");
    CHECK(pairs[0].caption_provenance == CaptionProvenance::narrative_summarized);
}

TEST_CASE("manifest errors carry line numbers") {
    const std::string header = R"({"dataset_name": "COCO", "caption_style": "human_multi"})";
    const std::string good = R"({"id": "a", "image": {"uri": "x", "width_px": 1, "height_px": 1}, "captions": ["c"]})";
    auto line_of = [](const std::string& s) {
        return error_line([&] {
            std::istringstream in(s);
            (void)read_manifest(in);
        });
    };
    CHECK(line_of(header + "\n" + good + "\n{broken\n") == 3);
    CHECK(line_of(header + "\n" + good + "\n" + good + "\n") == 3);  // duplicate id
    CHECK(line_of(header + "\n" + R"({"id": "b", "image": {"uri": "x", "width_px": 0, "height_px": 1}, "captions": ["c"]})") == 2);
    CHECK(line_of(header + "\n" + R"({"id": "b", "image": {"uri": "x", "width_px": 1, "height_px": 1}, "captions": []})") == 2);
    CHECK(line_of(header + "\n" + R"({"id": "b", "image": {"uri": "x", "width_px": 1, "height_px": 1}, "narrative": "n"})") == 2);
    CHECK(line_of(R"({"dataset_name": "COCO", "caption_style": "poetry"})") == 1);
    CHECK(line_of("") == 1);
    std::istringstream pred(R"({"dataset_name": "X", "caption_style": "predicted"})"
                            "\n"
                            R"({"id": "b", "image": {"uri": "x", "width_px": 1, "height_px": 1}, "captions": ["a", "b"]})");
    CHECK(code_of([&] { (void)read_manifest(pred); }) == ErrorCode::SchemaError);
    CHECK(code_of([] { (void)load_manifest("/nonexistent/manifest.jsonl"); }) == ErrorCode::ConfigError);
}

TEST_CASE("config defaults and overrides") {
    const auto d = PipelineConfig::from_json(Json::object());
    CHECK(d.thresholds == validator::Thresholds{0.25, 0.75});
    CHECK(d.decoding == DecodingParams{0.4, 700, 0.95, 30});
    CHECK(d.grounding == grounder::GroundingOptions{1, 0.35});
    CHECK(d.generation_retries == 2);
    CHECK(d.workers == 1);
    CHECK(d.backends.empty());

    const auto c = PipelineConfig::from_json(Json::parse(R"({
        "backends": {"llm": {"endpoint_url": "http://h:1/llm", "auth_token": "t", "timeout_ms": 10, "max_in_flight": 3, "retries": 5}},
        "mock_fixtures": ["m.json"],
        "thresholds": {"tau_c": 0.3, "tau_f": 0.6},
        "decoding": {"temperature": 0.0},
        "sampling_seed": 12345678901234,
        "grounding": {"max_boxes": 2, "min_conf": 0.5},
        "queries": {"binary": "Q {text}"},
        "concurrency": {"workers": 8},
        "generation": {"retries": 0, "negatives_per_pair": 3},
        "templates_dir": "tmpl"
    })"), "/base");
    const auto& llm = c.backends.at(clients::Role::llm);
    CHECK(llm.endpoint_url == "http://h:1/llm");
    CHECK(llm.auth_token == "t");
    CHECK(llm.max_in_flight == 3);
    CHECK(llm.retries == 5);
    CHECK(c.mock_fixtures == std::vector<std::filesystem::path>{"/base/m.json"});
    CHECK(c.thresholds == validator::Thresholds{0.3, 0.6});
    CHECK(c.decoding.temperature == 0.0);
    CHECK(c.decoding.max_tokens == 700);
    CHECK(c.sampling_seed == 12345678901234ull);
    CHECK(c.queries.binary == "Q {text}");
    CHECK(c.queries.feedback == eval::EvalQueries{}.feedback);
    CHECK(c.workers == 8);
    CHECK(c.negatives_per_pair == 3);
    CHECK(c.templates_dir == std::filesystem::path("/base/tmpl"));
}

TEST_CASE("config is strict") {
    for (const char* bad : {R"({"thresholds": {"tau_c": 0.3, "tau_x": 1}})", R"({"unknown": 1})",
                            R"({"backends": {"ocr": {"endpoint_url": "mock"}}})",
                            R"({"backends": {"llm": {"endpoint": "mock"}}})", R"({"thresholds": {"tau_c": 1.5}})",
                            R"({"concurrency": {"workers": 0}})", R"({"queries": {"binary": "no placeholder"}})",
                            R"({"sampling_seed": -1})", R"({"decoding": {"max_tokens": "many"}})",
                            R"({"generation": {"negatives_per_pair": 0}})", R"([1, 2])"}) {
        CAPTURE(bad);
        CHECK(code_of([&] { (void)PipelineConfig::from_json(Json::parse(bad)); }) == ErrorCode::ConfigError);
    }
    CHECK(code_of([] { (void)PipelineConfig::load("/nonexistent/config.json"); }) == ErrorCode::ConfigError);
    testing::TempDir dir;
    testing::spit(dir / "bad.json", "{not json");
    CHECK(code_of([&] { (void)PipelineConfig::load(dir / "bad.json"); }) == ErrorCode::ConfigError);
}

TEST_CASE("backends from config") {
    auto config = PipelineConfig::from_json(Json::parse(R"({"backends": {"nli": {"endpoint_url": "mock"}}})"));
    auto b = Backends::from_config(config);
    CHECK(b.nli().score_entailment("a dog", "a dog") == 1.0);
    CHECK(code_of([&] { (void)b.llm(); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { (void)b.vlm(); }) == ErrorCode::ConfigError);
    CHECK(b.grounding_or_null() == nullptr);
    // The tagger falls back to the built-in lexicon tagger.
    CHECK(b.tagger().tag("A dog").size() == 2);

    auto mock_tagger = PipelineConfig::from_json(Json::parse(R"({"backends": {"tagger": {"endpoint_url": "mock"}}})"));
    CHECK(code_of([&] { (void)Backends::from_config(mock_tagger); }) == ErrorCode::ConfigError);

    auto http = PipelineConfig::from_json(Json::parse(R"({"backends": {"vlm": {"endpoint_url": "http://127.0.0.1:1/"}}})"));
    auto hb = Backends::from_config(http);
    CHECK(dynamic_cast<clients::HttpVlmBackend*>(&hb.vlm()) != nullptr);

    ::setenv("MQ_VLM_URL", "mock", 1);
    auto overridden = Backends::from_config(http);
    CHECK(dynamic_cast<clients::MockVlm*>(&overridden.vlm()) != nullptr);
    ::unsetenv("MQ_VLM_URL");

    auto missing = PipelineConfig::from_json(Json::parse(R"({"mock_fixtures": ["/nonexistent/m.json"], "backends": {"nli": {"endpoint_url": "mock"}}})"));
    CHECK(code_of([&] { (void)Backends::from_config(missing); }) == ErrorCode::ConfigError);
}

TEST_CASE("resources from config") {
    const auto r = Resources::from_config(PipelineConfig{});
    CHECK(r.templates->keys().size() == 26);
    CHECK(r.lexicon->is_relation({"next", "to"}));

    testing::TempDir dir;
    testing::spit(dir / "coco.object.tmpl", "--CONTEXT--\nmine\n--FEWSHOT--\n--TAIL--\n{caption}\n");
    PipelineConfig c;
    c.templates_dir = dir.path();
    const auto o = Resources::from_config(c);
    CHECK(o.templates->keys().size() == 26);
    CHECK(o.templates->get("coco", "object").context_block == "mine\n");
}

TEST_CASE("the fifty-pair fixture") {
    const auto pairs = e2e_pairs();
    REQUIRE(pairs.size() == 50);
    E2e env;
    const auto result = run_pipeline(pairs, env.ptrs(), env.options(4));
    const auto& s = result.stats;
    const auto expected = Json::parse(testing::slurp(testing::fixture("e2e/expected_stats.json")));
    CHECK(s.input == expected["input"].get<std::size_t>());
    CHECK(s.emitted == expected["emitted"].get<std::size_t>());
    CHECK(s.parse_failed == expected["parse_failed"].get<std::size_t>());
    CHECK(s.rejected_contradiction == expected["rejected_contradiction"].get<std::size_t>());
    CHECK(s.rejected_feedback == expected["rejected_feedback"].get<std::size_t>());
    CHECK(s.grounded_failed == expected["grounded_failed"].get<std::size_t>());
    CHECK(s.reconciles());
    CHECK(s.input == s.emitted + s.parse_failed + s.rejected_contradiction + s.rejected_feedback + s.grounded_failed);
    CHECK(s.diagnostics == std::map<std::string, std::size_t>{
                               {"generate:ParseFailed", 1}, {"ground:NoDetection", 2}, {"sample:NoCandidates", 1}});
    REQUIRE(result.records.size() == 38);

    // Records come out in input order and carry the validated scores.
    std::vector<std::string> ids;
    for (const auto& r : result.records) ids.push_back(r.id);
    CHECK(std::is_sorted(ids.begin(), ids.end()));
    for (const char* dropped : {"p03", "p07", "p09", "p12", "p23"}) {
        CHECK(std::find(ids.begin(), ids.end(), dropped) == ids.end());
    }
    const auto& r0 = result.records.front();
    CHECK(r0.id == "p00");
    CHECK(r0.positive_caption == "A brown dog resting in the park.");
    CHECK(r0.negative_caption == "A brown cat resting in the park.");
    CHECK(r0.feedback == "The animal in the park is a dog, not a cat");
    CHECK(r0.misalignment_in_text == "cat in the park");
    CHECK(r0.visual.boxes().front().label == "dog in the park");
    CHECK(r0.validation.verdict == Verdict::keep);
    CHECK(r0.validation.contradiction_score < 0.25);
}

TEST_CASE("the pipeline is deterministic across worker counts") {
    const auto pairs = e2e_pairs();
    E2e env;
    const auto a = run_pipeline(pairs, env.ptrs(), env.options(1));
    const auto b = run_pipeline(pairs, env.ptrs(), env.options(6));
    const auto c = run_pipeline(pairs, env.ptrs(), env.options(3));
    CHECK(jsonl(a.records) == jsonl(b.records));
    CHECK(jsonl(a.records) == jsonl(c.records));
    CHECK(a.stats == b.stats);
}

TEST_CASE("several negatives per pair") {
    auto pairs = e2e_pairs();
    pairs.resize(3);
    E2e env;
    auto o = env.options(2);
    o.negatives_per_pair = 3;
    const auto r = run_pipeline(pairs, env.ptrs(), o);
    CHECK(r.stats.input == 9);
    CHECK(r.stats.reconciles());
    std::vector<std::string> ids;
    for (const auto& rec : r.records) ids.push_back(rec.id);
    CHECK(ids == std::vector<std::string>{"p00", "p00-n2", "p00-n3", "p01", "p01-n2", "p01-n3", "p02", "p02-n2", "p02-n3"});
}

TEST_CASE("empty input and a run where everything is rejected") {
    E2e env;
    const auto empty = run_pipeline({}, env.ptrs(), env.options(2));
    CHECK(empty.stats.input == 0);
    CHECK(empty.records.empty());
    CHECK(empty.stats.reconciles());

    auto pairs = e2e_pairs();
    auto o = env.options(2);
    o.thresholds.contradiction = 0.0;  // nothing is strictly below zero
    const auto r = run_pipeline(pairs, env.ptrs(), o);
    CHECK(r.records.empty());
    CHECK(r.stats.emitted == 0);
    CHECK(r.stats.rejected_contradiction == 50 - 2 - 0);
    CHECK(r.stats.reconciles());
}

TEST_CASE("missing backends and templates fail up front") {
    E2e env;
    auto p = env.ptrs();
    p.grounding = nullptr;
    CHECK(code_of([&] { (void)run_pipeline(e2e_pairs(), p, env.options(1)); }) == ErrorCode::ConfigError);
    auto pairs = e2e_pairs();
    pairs[5].source_dataset = "laion";
    CHECK(code_of([&] { (void)run_pipeline(pairs, env.ptrs(), env.options(1)); }) == ErrorCode::ConfigError);
}

TEST_CASE("run stats serialize") {
    RunStats s;
    s.input = 3;
    s.emitted = 1;
    s.parse_failed = 1;
    s.grounded_failed = 1;
    s.diagnostics["ground:NoDetection"] = 1;
    CHECK(s.reconciles());
    CHECK(s.failed() == 2);
    const auto j = s.to_json();
    CHECK(j["input"] == 3);
    CHECK(j["diagnostics"]["ground:NoDetection"] == 1);
    s.emitted = 2;
    CHECK_FALSE(s.reconciles());
}
