#include <doctest.h>

#include <algorithm>
#include <map>

#include "test_support.hpp"
#include "tvf/candidates/candidates.hpp"
#include "tvf/candidates/tagger.hpp"
#include "tvf/error.hpp"
#include "tvf/util/random.hpp"

using namespace tvf;
using namespace tvf::candidates;

namespace {

std::vector<std::string> surfaces(const CandidateMap& m, MisalignmentType t) {
    std::vector<std::string> out;
    for (const auto& c : m.at(t)) out.push_back(c.surface);
    return out;
}

CandidateMap four_way() {
    CandidateMap m;
    m[MisalignmentType::object] = {{MisalignmentType::object, 0, 3, "dog"}, {MisalignmentType::object, 10, 14, "ball"}};
    m[MisalignmentType::attribute] = {{MisalignmentType::attribute, 4, 7, "red"}};
    m[MisalignmentType::action] = {{MisalignmentType::action, 20, 27, "running"},
                                   {MisalignmentType::action, 30, 37, "jumping"},
                                   {MisalignmentType::action, 40, 46, "eating"}};
    m[MisalignmentType::relation] = {{MisalignmentType::relation, 50, 55, "under"}};
    return m;
}

} // namespace

TEST_CASE("word lists ignore comments and blanks") {
    CHECK(parse_word_list("# header\n\ndog\n  Cat  \r\n#x\nnext to\n") ==
          std::vector<std::string>{"dog", "cat", "next to"});
}

TEST_CASE("tokenizer keeps byte offsets") {
    const std::string caption = "A dog's red-ball, café!";
    const auto toks = tokenize(caption);
    REQUIRE(toks.size() >= 5);
    for (const auto& t : toks) CHECK(caption.substr(t.char_start, t.char_end - t.char_start) == t.text);
    CHECK(toks[1].text == "dog's");
    CHECK(toks[2].text == "red-ball");
    CHECK(toks[3].text == ",");
}

TEST_CASE("lexicon tagger parts of speech") {
    LexiconTagger tagger;
    CHECK(tagger.tag_word("the") == PartOfSpeech::other);
    CHECK(tagger.tag_word("under") == PartOfSpeech::preposition);
    CHECK(tagger.tag_word("red") == PartOfSpeech::adjective);
    CHECK(tagger.tag_word("dog") == PartOfSpeech::noun);
    CHECK(tagger.tag_word("skateboarding") == PartOfSpeech::verb);
    CHECK(tagger.tag_word("marvelous") == PartOfSpeech::adjective);
    CHECK(tagger.tag_word("quickly") == PartOfSpeech::other);
    CHECK(tagger.tag_word("zorblax") == PartOfSpeech::noun);
    CHECK(tagger.tag_word("42") == PartOfSpeech::other);
}

TEST_CASE("tag_caption refuses blank captions") {
    LexiconTagger tagger;
    CHECK_THROWS_AS((void)tag_caption("   ", tagger), Error);
}

TEST_CASE("candidates of the bowl caption") {
    LexiconTagger tagger;
    const std::string caption = "A crystal bowl filled with oranges on top of a table.";
    const auto m = extract_candidates(caption, tag_caption(caption, tagger));
    REQUIRE(m.size() == 4);
    const auto objects = surfaces(m, MisalignmentType::object);
    CHECK(std::find(objects.begin(), objects.end(), "bowl") != objects.end());
    CHECK(std::find(objects.begin(), objects.end(), "table") != objects.end());
    CHECK(surfaces(m, MisalignmentType::action) == std::vector<std::string>{"filled"});
    CHECK(surfaces(m, MisalignmentType::relation) == std::vector<std::string>{"on top of"});
    for (const auto& [type, list] : m) {
        for (const auto& c : list) {
            CHECK(c.category == type);
            CHECK(caption.substr(c.char_start, c.char_end - c.char_start) == c.surface);
        }
    }
}

TEST_CASE("stop words never become candidates") {
    LexiconTagger tagger;
    const std::string caption = "The and a, is are.";
    const auto m = extract_candidates(caption, tag_caption(caption, tagger));
    for (const auto& [_, list] : m) CHECK(list.empty());
    CHECK_THROWS_WITH_AS((void)sample_candidate(m, 1), doctest::Contains("no misalignment candidates"), Error);
}

TEST_CASE("sampling is deterministic per seed") {
    const auto m = four_way();
    for (std::uint64_t s = 0; s < 50; ++s) CHECK(sample_candidate(m, s) == sample_candidate(m, s));
}

TEST_CASE("categories are drawn uniformly, not by candidate count") {
    const auto m = four_way();
    std::map<MisalignmentType, int> counts;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        ++counts[sample_candidate(m, util::derive_seed(99, static_cast<std::uint64_t>(i))).category];
    }
    for (auto t : kAllMisalignmentTypes) {
        const double f = static_cast<double>(counts[t]) / n;
        CAPTURE(to_string(t));
        CHECK(std::abs(f - 0.25) <= 0.0065);
    }
}

TEST_CASE("a repeated surface resolves to its earliest span") {
    CandidateMap m;
    for (auto t : kAllMisalignmentTypes) m[t];
    m[MisalignmentType::object] = {{MisalignmentType::object, 2, 5, "dog"}, {MisalignmentType::object, 20, 23, "Dog"}};
    for (std::uint64_t s = 0; s < 20; ++s) CHECK(sample_candidate(m, s).char_start == 2);
}

TEST_CASE("positive caption is the longest by code points") {
    CHECK(select_positive_caption({"short", "a much longer caption", "mid length"}) == "a much longer caption");
    // Byte length would prefer the accented one.
    CHECK(select_positive_caption({"abcde", "ééé"}) == "abcde");
    CHECK(select_positive_caption_index({"same", "tied"}) == 0);
    CHECK_THROWS_AS((void)select_positive_caption({}), Error);
}

TEST_CASE("lexicon loads from a directory") {
    testing::TempDir dir;
    for (const char* f : {"stop.txt", "prepositions.txt", "adjectives.txt", "verbs.txt", "nouns.txt"}) {
        testing::spit(dir / f, "");
    }
    testing::spit(dir / "relations.txt", "next to\nunder\n");
    const auto lex = Lexicon::load(dir.path());
    CHECK(lex.is_relation({"next", "to"}));
    CHECK_FALSE(lex.is_relation({"over"}));
    std::filesystem::remove(dir / "verbs.txt");
    CHECK_THROWS_AS((void)Lexicon::load(dir.path()), Error);
}
