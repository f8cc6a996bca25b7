#include <doctest.h>

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "tvf/cli/cli.hpp"

using nlohmann::json;
using tvf::cli::run_cli;
namespace testing = tvf::testing;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run tvf_run(std::vector<std::string> args) {
    args.insert(args.begin(), "tvf");
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

json read_json(const std::filesystem::path& p) { return json::parse(testing::slurp(p)); }

// Config with every model role on the in-process mocks.
std::string mock_config(const testing::TempDir& dir, const std::string& fixture_rel, const json& extra = {}) {
    json c;
    c["backends"] = {{"llm", {{"endpoint_url", "mock"}}},
                     {"nli", {{"endpoint_url", "mock"}}},
                     {"grounding", {{"endpoint_url", "mock"}}},
                     {"vlm", {{"endpoint_url", "mock"}}}};
    c["mock_fixtures"] = {testing::fixture(fixture_rel).string()};
    if (extra.is_object()) c.update(extra);
    const auto path = dir / ("config-" + std::to_string(std::hash<std::string>{}(c.dump())) + ".json");
    testing::spit(path, c.dump(1));
    return path.string();
}

} // namespace

TEST_CASE("exit codes for usage problems") {
    CHECK(tvf_run({"--help"}).code == 0);
    CHECK(tvf_run({}).code == 2);
    CHECK(tvf_run({"frobnicate"}).code == 2);
    CHECK(tvf_run({"sweep", "--input", "x.jsonl"}).code == 2);
    CHECK(tvf_run({"--workers", "0", "sweep", "--input", "a", "--out", "b"}).code == 2);

    const auto r = tvf_run({"generate", "--out", "x.jsonl"});
    CHECK(r.code == 2);
    CHECK(r.err.find("--input or --manifest") != std::string::npos);

    testing::TempDir dir;
    CHECK(tvf_run({"sweep", "--input", (dir / "missing.jsonl").string(), "--out", (dir / "h.csv").string()}).code == 2);
}

TEST_CASE("a bad config is a usage error") {
    testing::TempDir dir;
    testing::spit(dir / "bad.json", R"({"sampling_seed": 1, "no_such_key": true})");
    const auto r = tvf_run({"--config", (dir / "bad.json").string(), "generate", "--input",
                            testing::fixture("e2e/pairs.jsonl").string(), "--out", (dir / "o.jsonl").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("no_such_key") != std::string::npos);

    testing::spit(dir / "broken.json", "{");
    CHECK(tvf_run({"--config", (dir / "broken.json").string(), "sweep", "--input", "a", "--out", "b"}).code == 2);
}

TEST_CASE("generate is reproducible and writes stats") {
    testing::TempDir dir;
    const auto config = testing::fixture("e2e/config.json").string();
    const auto input = testing::fixture("e2e/pairs.jsonl").string();
    const auto a = (dir / "a.jsonl").string();
    const auto b = (dir / "b.jsonl").string();

    const auto ra = tvf_run({"--config", config, "--workers", "1", "generate", "--input", input, "--out", a});
    REQUIRE(ra.code == 0);
    CHECK(ra.out.find("emitted 38") != std::string::npos);
    REQUIRE(tvf_run({"--config", config, "--workers", "5", "generate", "--input", input, "--out", b}).code == 0);

    const auto bytes = testing::slurp(a);
    CHECK(bytes == testing::slurp(b));
    CHECK(testing::slurp(a + ".stats.json") == testing::slurp(b + ".stats.json"));
    CHECK(lines_of(bytes).size() == 38);

    const auto stats = read_json(a + ".stats.json");
    const auto expected = read_json(testing::fixture("e2e/expected_stats.json"));
    for (const auto& [k, v] : expected.items()) {
        CAPTURE(k);
        CHECK(stats.at(k) == v);
    }

    // Twelve of fifty fail.
    CHECK(tvf_run({"--config", config, "generate", "--input", input, "--out", b, "--fail-threshold", "0.24"}).code == 0);
    CHECK(tvf_run({"--config", config, "generate", "--input", input, "--out", b, "--fail-threshold", "0.2"}).code == 1);

    const auto other_seed = (dir / "c.jsonl").string();
    REQUIRE(tvf_run({"--config", config, "generate", "--input", input, "--out", other_seed, "--seed", "8"}).code == 0);
    CHECK(testing::slurp(other_seed) != bytes);
}

TEST_CASE("ingest then generate from a manifest") {
    testing::TempDir dir;
    testing::spit(dir / "manifest.jsonl",
                  R"({"dataset_name": "COCO", "caption_style": "human_multi"})"
                  "\n"
                  R"({"id": "m1", "image": {"uri": "fixtures/e2e/img_00.jpg", "width_px": 640, "height_px": 480}, "captions": ["A dog.", "A brown dog resting in the park."]})"
                  "\n");
    const auto pairs = (dir / "pairs.jsonl").string();
    const auto r = tvf_run({"ingest", "--manifest", (dir / "manifest.jsonl").string(), "--out", pairs});
    REQUIRE(r.code == 0);
    CHECK(r.out == "ingested 1 pairs from COCO\n");
    const auto rows = lines_of(testing::slurp(pairs));
    REQUIRE(rows.size() == 1);
    CHECK(json::parse(rows[0])["caption"] == "A brown dog resting in the park.");

    const auto config = testing::fixture("e2e/config.json").string();
    const auto out = (dir / "train.jsonl").string();
    REQUIRE(tvf_run({"--config", config, "generate", "--manifest", (dir / "manifest.jsonl").string(), "--out", out})
                .code == 0);
    CHECK(read_json(out + ".stats.json")["input"] == 1);
}

TEST_CASE("export-train writes feedback and binary examples") {
    testing::TempDir dir;
    const auto config = testing::fixture("e2e/config.json").string();
    const auto records = (dir / "records.jsonl").string();
    REQUIRE(tvf_run({"--config", config, "generate", "--input", testing::fixture("e2e/pairs.jsonl").string(), "--out",
                     records})
                .code == 0);

    const auto all = (dir / "all.jsonl").string();
    REQUIRE(tvf_run({"export-train", "--input", records, "--out", all}).code == 0);
    const auto rows = lines_of(testing::slurp(all));
    REQUIRE(rows.size() == 38 * 3);
    const auto first = json::parse(rows[0]);
    CHECK(first["id"] == "p00-feedback");
    CHECK(first["query"].get<std::string>().find("A brown cat resting in the park.") != std::string::npos);
    CHECK(first["target"].get<std::string>().rfind("The animal in the park is a dog, not a cat", 0) == 0);
    CHECK(json::parse(rows[1])["target"] == "yes");
    CHECK(json::parse(rows[2])["target"] == "no");

    const auto feedback_only = (dir / "fb.jsonl").string();
    REQUIRE(tvf_run({"export-train", "--input", records, "--out", feedback_only, "--no-binary"}).code == 0);
    CHECK(lines_of(testing::slurp(feedback_only)).size() == 38);
}

TEST_CASE("validate then sweep") {
    testing::TempDir dir;
    const auto config = mock_config(dir, "e2e/mocks.json");
    std::string rows;
    for (const char* contradiction : {"a red car", "a blue car parked", "a red car on the street"}) {
        rows += json{{"original", "a red car on the street"},
                     {"contradiction", contradiction},
                     {"feedback", "the car is red"}}
                    .dump() +
                "\n";
    }
    testing::spit(dir / "in.jsonl", rows);
    const auto scored = (dir / "scored.jsonl").string();
    const auto r = tvf_run({"--config", config, "validate", "--input", (dir / "in.jsonl").string(), "--out", scored});
    REQUIRE(r.code == 0);
    const auto out = lines_of(testing::slurp(scored));
    REQUIRE(out.size() == 3);
    for (const auto& line : out) {
        const auto j = json::parse(line);
        CHECK(j.contains("contradiction_score"));
        CHECK(j.contains("feedback_score"));
        CHECK(j.contains("verdict"));
        CHECK(j["original"] == "a red car on the street");
    }

    const auto csv = (dir / "heat.csv").string();
    REQUIRE(tvf_run({"sweep", "--input", scored, "--out", csv, "--step", "0.25"}).code == 0);
    const auto heat = lines_of(testing::slurp(csv));
    REQUIRE(heat.size() == 6);
    CHECK(heat[0] == "tau_c\\tau_f,0.0000,0.2500,0.5000,0.7500,1.0000");
    CHECK(tvf_run({"sweep", "--input", scored, "--out", csv, "--step", "0"}).code == 2);
    CHECK(tvf_run({"--config", config, "validate", "--input", scored, "--out", scored, "--tau-c", "2"}).code == 2);
}

TEST_CASE("ground labels into normalized boxes") {
    testing::TempDir dir;
    const auto config = mock_config(dir, "eval/duck.json");
    const json image = {{"uri", "fixture://table1/4.jpg"}, {"width_px", 800}, {"height_px", 600}, {"kind", "natural"}};
    testing::spit(dir / "in.jsonl", json{{"image", image}, {"label", "duck swimming"}}.dump() + "\n" +
                                        json{{"image", image}, {"labels", {"a unicorn"}}}.dump() + "\n");
    const auto out = (dir / "out.jsonl").string();
    const auto r = tvf_run({"--config", config, "ground", "--input", (dir / "in.jsonl").string(), "--out", out});
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(r.out == "grounded 1 of 2\n");
    const auto rows = lines_of(testing::slurp(out));
    REQUIRE(rows.size() == 2);
    const auto hit = json::parse(rows[0]);
    REQUIRE(hit["visual"].size() == 1);
    CHECK(hit["visual"][0]["box"] == json{339, 245, 581, 834});
    CHECK(hit["visual"][0]["label"] == "duck swimming");
    const auto miss = json::parse(rows[1]);
    CHECK(miss["visual"].is_null());
    CHECK(miss["error"]["code"] == "NoDetection");

    CHECK(tvf_run({"--config", config, "ground", "--input", (dir / "in.jsonl").string(), "--out", out,
                   "--fail-threshold", "0.25"})
              .code == 1);
}

TEST_CASE("evaluate scripted models") {
    testing::TempDir dir;
    const auto bench = testing::fixture("eval/benchmark.jsonl").string();

    SUBCASE("perfect") {
        const auto report = (dir / "perfect.json").string();
        const auto r = tvf_run({"--config", mock_config(dir, "eval/perfect.json"), "evaluate", "--input", bench,
                                "--out", report});
        REQUIRE(r.code == 0);
        const auto j = read_json(report);
        CHECK(j["complete"] == true);
        const auto& a = j["aggregate"];
        CHECK(a["n"] == 12);
        for (const char* k : {"binary_accuracy", "feedback_nli_mean", "text_nli_mean", "f1_at_075"}) {
            CAPTURE(k);
            CHECK(a[k] == 1.0);
        }
        CHECK(a["parse_failure_rate"] == 0.0);
        CHECK(lines_of(testing::slurp(report + ".csv")).size() == 13);
    }
    SUBCASE("garbage") {
        const auto report = (dir / "garbage.json").string();
        const auto csv = (dir / "rows.csv").string();
        REQUIRE(tvf_run({"--config", mock_config(dir, "eval/garbage.json"), "evaluate", "--input", bench, "--out",
                         report, "--csv", csv})
                    .code == 0);
        const auto a = read_json(report)["aggregate"];
        CHECK(a["parse_failure_rate"] == 1.0);
        for (const char* k : {"binary_accuracy", "feedback_nli_mean", "text_nli_mean", "f1_at_075"}) {
            CAPTURE(k);
            CHECK(a[k] == 0.0);
        }
        CHECK(lines_of(testing::slurp(csv)).size() == 13);
    }
    SUBCASE("two-step duck") {
        const auto report = (dir / "duck.json").string();
        REQUIRE(tvf_run({"--config", mock_config(dir, "eval/duck.json"), "evaluate", "--input",
                         testing::fixture("eval/duck.jsonl").string(), "--mode", "two-step", "--out", report})
                    .code == 0);
        const auto j = read_json(report);
        CHECK(j["aggregate"]["f1_at_075"] == 1.0);
        CHECK(j["per_instance"][0]["visual_tp"] == 1);
    }
    SUBCASE("unknown mode") {
        CHECK(tvf_run({"--config", mock_config(dir, "eval/perfect.json"), "evaluate", "--input", bench, "--mode",
                       "three-step", "--out", (dir / "x.json").string()})
                  .code == 2);
    }
}

TEST_CASE("an unreachable model aborts with a partial report") {
    testing::TempDir dir;
    json c;
    c["backends"] = {{"nli", {{"endpoint_url", "mock"}}},
                     {"vlm", {{"endpoint_url", "http://127.0.0.1:1"}, {"retries", 0}, {"timeout_ms", 500}}}};
    testing::spit(dir / "c.json", c.dump());
    const auto report = (dir / "r.json").string();
    const auto r = tvf_run({"--config", (dir / "c.json").string(), "evaluate", "--input",
                            testing::fixture("eval/benchmark.jsonl").string(), "--out", report});
    CHECK(r.code == 1);
    CHECK(r.err.find("partial report written") != std::string::npos);
    const auto j = read_json(report);
    CHECK(j["complete"] == false);
    CHECK(j["per_instance"].empty());
    CHECK(j.contains("error"));
}

TEST_CASE("correlate scores against agreement") {
    testing::TempDir dir;
    json report;
    report["per_instance"] = json::array();
    std::string agreement;
    const std::vector<std::pair<std::string, double>> scores = {{"a", 0.1}, {"b", 0.4}, {"c", 0.6}, {"d", 0.9}};
    for (std::size_t i = 0; i < scores.size(); ++i) {
        report["per_instance"].push_back({{"id", scores[i].first}, {"feedback_nli", scores[i].second}});
        agreement += json{{"instance_id", scores[i].first}, {"feedback", i}, {"text", 3 - i}, {"visual", 1}}.dump() +
                     "\n";
    }
    testing::spit(dir / "report.json", report.dump());
    testing::spit(dir / "agree.jsonl", agreement);
    const auto csv = (dir / "c.csv").string();
    const auto base = std::vector<std::string>{"correlate", "--agreement", (dir / "agree.jsonl").string(),
                                               "--report", (dir / "report.json").string(), "--out", csv};

    auto r = tvf_run(base);
    REQUIRE(r.code == 0);
    CHECK(lines_of(testing::slurp(csv)).back() == "spearman,1.000000,defined");

    auto args = base;
    args.insert(args.end(), {"--question", "text"});
    REQUIRE(tvf_run(args).code == 0);
    CHECK(lines_of(testing::slurp(csv)).back() == "spearman,-1.000000,defined");

    args = base;
    args.insert(args.end(), {"--metric", "bleu4"});
    CHECK(tvf_run(args).code == 2);
}

TEST_CASE("review-serve export") {
    testing::TempDir dir;
    std::filesystem::copy_file(testing::fixture("review/verdicts.jsonl"), dir / "log.jsonl");
    const auto accepted = (dir / "accepted.jsonl").string();
    const auto levels = (dir / "levels.jsonl").string();
    const auto r = tvf_run({"review-serve", "--instances", testing::fixture("review/instances.jsonl").string(), "--log",
                            (dir / "log.jsonl").string(), "--export", accepted, "--export-agreement", levels});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("exported 66 of 100 instances, acceptance rate 0.66\n") == 0);
    const auto rows = lines_of(testing::slurp(accepted));
    REQUIRE(rows.size() == 66);
    for (const auto& line : rows) CHECK(json::parse(line)["review_status"] == "accepted");
    CHECK(lines_of(testing::slurp(levels)).size() == 100);

    // A rater outside the allow-list is still only an audit concern for old verdicts.
    CHECK(tvf_run({"review-serve", "--instances", testing::fixture("review/instances.jsonl").string(), "--log",
                   (dir / "log.jsonl").string(), "--raters", "r1,r2", "--export", accepted})
              .code == 0);
    CHECK(tvf_run({"review-serve", "--instances", (dir / "missing.jsonl").string(), "--log",
                   (dir / "log.jsonl").string(), "--export", accepted})
              .code == 2);
}

TEST_CASE("serve-mocks refuses bad fixtures") {
    testing::TempDir dir;
    CHECK(tvf_run({"serve-mocks", "--fixtures", (dir / "missing.json").string(), "--port", "0"}).code == 2);
    testing::spit(dir / "bad.json", R"({"vlm": 3})");
    CHECK(tvf_run({"serve-mocks", "--fixtures", (dir / "bad.json").string(), "--port", "0"}).code == 2);
}
