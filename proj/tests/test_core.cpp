#include <doctest.h>

#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "test_support.hpp"
#include "tvf/core/records_json.hpp"
#include "tvf/core/target.hpp"
#include "tvf/core/text.hpp"
#include "tvf/error.hpp"
#include "tvf/util/parallel.hpp"
#include "tvf/util/random.hpp"

using namespace tvf;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

VisualAnnotation one_box(int x1, int y1, int x2, int y2, std::string label) {
    return VisualAnnotation::make({{NormBox::make(x1, y1, x2, y2), std::move(label)}});
}

} // namespace

TEST_CASE("text helpers") {
    CHECK(text::trim("  a b \t\n") == "a b");
    CHECK(text::to_lower("MiXeD Ünï") == "mixed Ünï");
    CHECK(text::collapse_whitespace("  a \t b\n\nc ") == "a b c");
    CHECK(text::is_blank(" \t\r\n"));
    CHECK_FALSE(text::is_blank(" x "));
    CHECK(text::utf8_length("café") == 4);
    CHECK(text::normalize_sentence("  The Cat  sat. ") == "the cat sat");
    CHECK(text::alnum_tokens("It's a 2-way street!") == std::vector<std::string>{"it", "s", "a", "2", "way", "street"});

    const auto parts = text::split("a | b |  | c", " | ");
    REQUIRE(parts.size() == 4);
    CHECK(parts[2].empty());
    CHECK(text::join({"x", "y", "z"}, " and ") == "x and y and z");
}

TEST_CASE("NormBox enforces the grid and a positive extent") {
    const auto b = NormBox::make(100, 200, 500, 600);
    CHECK(b.area() == 400 * 400);
    CHECK(code_of([] { (void)NormBox::make(-1, 0, 10, 10); }) == ErrorCode::OutOfRange);
    CHECK(code_of([] { (void)NormBox::make(0, 0, 1001, 10); }) == ErrorCode::OutOfRange);
    CHECK(code_of([] { (void)NormBox::make(10, 0, 10, 10); }) == ErrorCode::Degenerate);
    CHECK(code_of([] { (void)NormBox::make(10, 20, 5, 30); }) == ErrorCode::Degenerate);
    CHECK_NOTHROW((void)NormBox::make(0, 0, 1000, 1000));
}

TEST_CASE("VisualAnnotation rejects empty lists and labels") {
    CHECK(code_of([] { (void)VisualAnnotation::make({}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)one_box(0, 0, 1, 1, ""); }) == ErrorCode::InvalidArgument);
    const auto joined = one_box(0, 0, 10, 10, "a").concat(one_box(5, 5, 20, 20, "b"));
    REQUIRE(joined.size() == 2);
    CHECK(joined.boxes()[1].label == "b");
}

TEST_CASE("ImageRef::make validates extents") {
    CHECK(code_of([] { (void)ImageRef::make("x.jpg", 0, 10, ImageKind::natural); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)ImageRef::make("", 10, 10, ImageKind::natural); }) == ErrorCode::InvalidArgument);
    CHECK(ImageRef::make("x.jpg", 4, 3, ImageKind::synthetic).kind == ImageKind::synthetic);
}

TEST_CASE("misalignment type names") {
    CHECK(parse_misalignment_type("Object/Noun") == MisalignmentType::object);
    CHECK(parse_misalignment_type("adjective") == MisalignmentType::attribute);
    CHECK(parse_misalignment_type("ACTION") == MisalignmentType::action);
    CHECK(parse_misalignment_type(" Relation ") == MisalignmentType::relation);
    CHECK(code_of([] { (void)parse_misalignment_type("Color"); }) == ErrorCode::UnknownType);
    for (auto t : kAllMisalignmentTypes) {
        CHECK(parse_misalignment_type(prompt_label(t)) == t);
        CHECK(parse_misalignment_type(to_string(t)) == t);
    }
}

TEST_CASE("BenchmarkInstance rejects feedback on aligned instances") {
    BenchmarkInstance b;
    b.id = "x";
    b.caption = "A brown dog";
    b.alignment_label = true;
    b.gt_feedback = "The dog is brown";
    CHECK(code_of([&] { b.validate(); }) == ErrorCode::InvalidArgument);
    b.alignment_label = false;
    CHECK_NOTHROW(b.validate());
}

TEST_CASE("targets of the dataset examples render and parse byte for byte") {
    const auto doc = nlohmann::json::parse(testing::slurp(testing::fixture("table1.json")));
    for (const auto& row : doc["rows"]) {
        const auto target = row["target"].get<std::string>();
        CAPTURE(target);
        const auto parts = parse_target(target);
        CHECK(parts.feedback == row["feedback"].get<std::string>());
        CHECK(parts.text_cue == row["misalignment_in_text"].get<std::string>());
        CHECK(render_boxes(parts.visual) == row["boxes"].get<std::string>());
        CHECK(render_target(parts.feedback, parts.text_cue, parts.visual) == target);
    }
}

TEST_CASE("the two-box row keeps both boxes in order") {
    const auto v = parse_boxes("[277, 26, 664, 477] two men and [608, 3, 729, 998] a rail");
    REQUIRE(v.size() == 2);
    CHECK(v.boxes()[0].box == NormBox::make(277, 26, 664, 477));
    CHECK(v.boxes()[0].label == "two men");
    CHECK(v.boxes()[1].box == NormBox::make(608, 3, 729, 998));
    CHECK(v.boxes()[1].label == "a rail");
}

TEST_CASE("render_target rejects fields that would not parse back") {
    const auto v = one_box(1, 2, 3, 4, "cat");
    CHECK(code_of([&] { (void)render_target("", "cue", v); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { (void)render_target("a | b", "cue", v); }) == ErrorCode::SeparatorInField);
    CHECK(code_of([&] { (void)render_target("fb", "cu|e", v); }) == ErrorCode::SeparatorInField);
    CHECK(code_of([&] { (void)render_target("fb", "cue", one_box(1, 2, 3, 4, "a|b")); }) ==
          ErrorCode::SeparatorInField);
    CHECK(code_of([&] { (void)render_target("fb", "cue", one_box(1, 2, 3, 4, "a [b")); }) == ErrorCode::MalformedBox);
}

TEST_CASE("parse_target failure modes") {
    CHECK(code_of([] { (void)parse_target("only feedback"); }) == ErrorCode::MalformedSeparators);
    CHECK(code_of([] { (void)parse_target("a | b | [1, 2, 3, 4] x | d"); }) == ErrorCode::MalformedSeparators);
    CHECK(code_of([] { (void)parse_target("a | b | 1, 2, 3, 4 x"); }) == ErrorCode::MalformedBox);
    CHECK(code_of([] { (void)parse_target("a | b | [1, 2, 3] x"); }) == ErrorCode::MalformedBox);
    CHECK(code_of([] { (void)parse_target("a | b | [1, 2, 3, 1004] x"); }) == ErrorCode::OutOfRange);
    CHECK(code_of([] { (void)parse_target("a | b | [1, 2, 3, 4]"); }) == ErrorCode::MalformedBox);
}

TEST_CASE("render/parse round trip on random triples") {
    std::mt19937_64 rng(1234);
    const std::vector<std::string> words = {"dog", "red", "ball", "on", "the", "table", "not", "a", "café", "x2"};
    auto phrase = [&](std::size_t max_words) {
        std::string s;
        const auto n = 1 + util::uniform_index(rng, max_words);
        for (std::size_t i = 0; i < n; ++i) {
            if (i) s += ' ';
            s += words[util::uniform_index(rng, words.size())];
        }
        return s;
    };
    for (int iter = 0; iter < 2000; ++iter) {
        std::vector<LabeledBox> boxes;
        const auto n = 1 + util::uniform_index(rng, 3);
        for (std::size_t i = 0; i < n; ++i) {
            const int x1 = static_cast<int>(util::uniform_index(rng, 1000));
            const int y1 = static_cast<int>(util::uniform_index(rng, 1000));
            const int x2 = x1 + 1 + static_cast<int>(util::uniform_index(rng, static_cast<std::size_t>(1000 - x1)));
            const int y2 = y1 + 1 + static_cast<int>(util::uniform_index(rng, static_cast<std::size_t>(1000 - y1)));
            boxes.push_back({NormBox::make(x1, y1, x2, y2), phrase(3)});
        }
        const auto visual = VisualAnnotation::make(boxes);
        const auto fb = phrase(8);
        const auto cue = phrase(4);
        const auto s = render_target(fb, cue, visual);
        const auto back = parse_target(s);
        REQUIRE(back.feedback == fb);
        REQUIRE(back.text_cue == cue);
        REQUIRE(back.visual == visual);
    }
}

TEST_CASE("JSONL round trip for training records and benchmark instances") {
    TrainingRecord r;
    r.id = "r1";
    r.source_dataset = "coco";
    r.image = ImageRef::make("img/1.jpg", 640, 480, ImageKind::natural);
    r.positive_caption = "A crystal bowl filled with oranges on top of a table.";
    r.negative_caption = "A crystal bowl filled with oranges beneath a table.";
    r.misalignment_type = MisalignmentType::relation;
    r.feedback = "The bowl is on top of the table, not beneath it.";
    r.misalignment_in_text = "bowl beneath a table";
    r.visual = one_box(100, 100, 500, 500, "bowl on top of a table");
    r.validation = {0.02, 0.97, Verdict::keep};

    std::stringstream ss;
    json_io::write_jsonl(ss, std::vector<TrainingRecord>{r, r});
    const auto text = ss.str();
    CHECK(text.find("\"misalignment_type\":\"relation\"") != std::string::npos);
    const auto back = json_io::read_training_records(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == r);

    BenchmarkInstance b;
    b.id = "b1";
    b.image = r.image;
    b.caption = r.negative_caption;
    b.alignment_label = false;
    b.gt_feedback = r.feedback;
    b.gt_misalignment_in_text = r.misalignment_in_text;
    b.gt_visual = r.visual;
    b.review_status = ReviewStatus::accepted;
    BenchmarkInstance aligned;
    aligned.id = "b2";
    aligned.image = r.image;
    aligned.caption = r.positive_caption;
    aligned.alignment_label = true;

    std::stringstream bs;
    json_io::write_jsonl(bs, std::vector<BenchmarkInstance>{b, aligned});
    const auto inst = json_io::read_benchmark_instances(bs);
    REQUIRE(inst.size() == 2);
    CHECK(inst[0] == b);
    CHECK(inst[1] == aligned);
}

TEST_CASE("read_jsonl reports the failing line") {
    std::stringstream ss("{\"a\":1}\n\n{broken\n");
    try {
        json_io::read_jsonl(ss, [](const json_io::Json&, long) {});
        FAIL("expected SchemaError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SchemaError);
        CHECK(e.line() == 3);
    }

    std::stringstream missing("{\"id\":\"x\"}\n");
    try {
        (void)json_io::read_aligned_pairs(missing);
        FAIL("expected SchemaError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SchemaError);
        CHECK(e.line() == 1);
        CHECK(std::string(e.what()).find("image") != std::string::npos);
    }
}

TEST_CASE("derived seeds are stable and distinct") {
    CHECK(util::derive_seed(7, 3, 1) == util::derive_seed(7, 3, 1));
    CHECK(util::derive_seed(7, 3, 1) != util::derive_seed(7, 3, 2));
    CHECK(util::derive_seed(7, 3, 1) != util::derive_seed(7, 4, 1));
    CHECK(util::derive_seed(7, 3, 1) != util::derive_seed(8, 3, 1));
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) CHECK(util::uniform_index(rng, 7) < 7);
}

TEST_CASE("parallel_for keeps results by index and rethrows") {
    std::vector<int> out(500, -1);
    util::parallel_for(out.size(), 8, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));

    CHECK_THROWS_AS(util::parallel_for(100, 4,
                                       [](std::size_t i) {
                                           if (i == 42) throw std::runtime_error("boom");
                                       }),
                    std::runtime_error);
    int calls = 0;
    util::parallel_for(0, 4, [&](std::size_t) { ++calls; });
    CHECK(calls == 0);
}
