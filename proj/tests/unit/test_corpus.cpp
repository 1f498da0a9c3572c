#include <doctest.h>

#include <sstream>

#include "abl/corpus.hpp"
#include "abl/random.hpp"
#include "support/oracles.hpp"

using namespace abl;

namespace {

std::vector<Span> spans_of(const TreeBankEntry &e) {
    std::vector<Span> out;
    for (const auto &b : e.brackets) out.push_back(b.span);
    return out;
}

} // namespace

TEST_CASE("parse_plain tokenizes and interns") {
    auto c = parse_plain("Show me flights\n");
    REQUIRE(c.size() == 1);
    CHECK(c.sentences[0].length() == 3);
    CHECK(c.vocab.surface(c.sentences[0].tokens[2]) == "flights");

    CHECK(parse_plain("").empty());

    auto twice = parse_plain("a b\na b\n");
    REQUIRE(twice.size() == 2);
    CHECK(twice.sentences[0].tokens == twice.sentences[1].tokens);
    CHECK(twice.sentences[1].sid == 1);
}

TEST_CASE("parse_plain skips blank lines and collapses whitespace") {
    auto c = parse_plain("\n  a\t b  \n\n   \nc\n");
    REQUIRE(c.size() == 2);
    CHECK(detokenize(c.vocab, c.sentences[0]) == "a b");
    CHECK(c.sentences[1].sid == 1);
}

TEST_CASE("interning is injective and round-trips") {
    Vocabulary v;
    const auto a = v.intern("to");
    const auto b = v.intern("from");
    CHECK(a != b);
    CHECK(v.intern("to") == a);
    CHECK(v.surface(b) == "from");
    CHECK(v.find("nowhere") == std::nullopt);
    // Byte equality, no normalization.
    CHECK(v.intern("To") != a);
}

TEST_CASE("parse_treebank counts terminals only") {
    auto tb = parse_treebank("(S What is (NP the name ) )");
    REQUIRE(tb.size() == 1);
    const auto &e = tb.entries[0];
    CHECK(e.sentence.length() == 4);
    REQUIRE(e.brackets.size() == 2);
    CHECK(e.brackets[0] == LabelledSpan{{0, 4}, "S"});
    CHECK(e.brackets[1] == LabelledSpan{{2, 4}, "NP"});
}

TEST_CASE("a treebank line may be a forest") {
    auto tb = parse_treebank("(S a ) (S b )");
    REQUIRE(tb.size() == 1);
    CHECK(tb.entries[0].brackets == std::vector<LabelledSpan>{{{0, 1}, "S"}, {{1, 2}, "S"}});
}

TEST_CASE("parse_treebank errors name the line") {
    SUBCASE("unclosed") {
        try {
            parse_treebank("(S a )\n(S a (NP b\n");
            FAIL("expected a parse error");
        } catch (const ParseError &e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("extra closer") { CHECK_THROWS_AS(parse_treebank("(S a ) )"), ParseError); }
    SUBCASE("empty bracket") { CHECK_THROWS_AS(parse_treebank("(S a (X ) )"), ParseError); }
    SUBCASE("no terminals") { CHECK_THROWS_AS(parse_treebank("(S )"), ParseError); }
}

TEST_CASE("unary chains keep outer-to-inner order") {
    auto tb = parse_treebank("(S (NP (NN x ) ) )");
    REQUIRE(tb.entries[0].brackets.size() == 3);
    CHECK(tb.entries[0].brackets[0].label == "S");
    CHECK(tb.entries[0].brackets[2].label == "NN");
    CHECK(write_brackets(tb.vocab, tb.entries[0].sentence, tb.entries[0].brackets) ==
          "(S (NP (NN x ) ) )");
}

TEST_CASE("strip keeps tokens and order") {
    auto tb = parse_treebank("(S a b )\n(S (NP c ) d )\n");
    auto c = strip(tb);
    REQUIRE(c.size() == 2);
    CHECK(detokenize(c.vocab, c.sentences[0]) == "a b");
    CHECK(detokenize(c.vocab, c.sentences[1]) == "c d");
    CHECK(strip(parse_treebank("")).empty());

    // Same token sequences as parsing the detokenized text directly.
    std::ostringstream plain;
    write_plain(plain, c);
    auto direct = parse_plain(plain.str());
    REQUIRE(direct.size() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        CHECK(detokenize(direct.vocab, direct.sentences[i]) == detokenize(c.vocab, c.sentences[i]));
}

TEST_CASE("write_brackets renders decimal labels") {
    auto c = parse_plain("a b\nShow me flights from Atlanta to Boston\n");
    CHECK(write_brackets(c.vocab, c.sentences[0], {{{0, 2}, "0"}}) == "(0 a b )");
    CHECK(write_brackets(c.vocab, c.sentences[1], {{{2, 7}, "1"}}) ==
          "Show me (1 flights from Atlanta to Boston )");
    CHECK(write_brackets(c.vocab, c.sentences[1], {{{2, 7}, "1"}, {{0, 7}, "0"}}) ==
          "(0 Show me (1 flights from Atlanta to Boston ) )");
}

TEST_CASE("write_brackets rejects crossing and empty spans") {
    auto c = parse_plain("a b c d\n");
    CHECK_THROWS_AS(write_brackets(c.vocab, c.sentences[0], {{{0, 2}, "1"}, {{1, 3}, "2"}}),
                    CrossingBracketsError);
    CHECK_THROWS_AS(write_brackets(c.vocab, c.sentences[0], {{{1, 1}, "1"}}), std::invalid_argument);
    CHECK_THROWS_AS(write_brackets(c.vocab, c.sentences[0], {{{1, 5}, "1"}}), std::invalid_argument);
}

TEST_CASE("bracket write then parse is the identity on random trees") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t len = 1 + rng.below(10);
        Corpus c;
        std::vector<std::string> words;
        for (std::size_t i = 0; i < len; ++i) words.push_back("w" + std::to_string(rng.below(5)));
        c.add({words.begin(), words.end()});
        std::vector<Span> spans;
        oracle::random_tree(rng, 0, len, spans);
        std::vector<LabelledSpan> brackets;
        for (const auto &s : spans) brackets.push_back({s, std::to_string(rng.below(4))});

        const auto line = write_brackets(c.vocab, c.sentences[0], brackets);
        auto tb = parse_treebank(line);
        REQUIRE(tb.size() == 1);
        CHECK(detokenize(tb.vocab, tb.entries[0].sentence) == detokenize(c.vocab, c.sentences[0]));
        auto expected = brackets;
        auto got = tb.entries[0].brackets;
        auto by_span = [](const LabelledSpan &a, const LabelledSpan &b) {
            return a.span != b.span ? OuterFirst{}(a.span, b.span) : a.label < b.label;
        };
        std::sort(expected.begin(), expected.end(), by_span);
        std::sort(got.begin(), got.end(), by_span);
        CHECK(got == expected);
        // Writing the parsed form again is stable.
        CHECK(write_brackets(tb.vocab, tb.entries[0].sentence, tb.entries[0].brackets) == line);
        for (const auto &a : spans_of(tb.entries[0]))
            for (const auto &b : spans_of(tb.entries[0])) CHECK_FALSE(crosses(a, b));
    }
}

TEST_CASE("corpus checksum depends on content only") {
    auto a = parse_plain("x y\nz\n");
    auto b = parse_plain("  x   y \n\nz");
    auto c = parse_plain("x y\nz z\n");
    CHECK(corpus_checksum(a) == corpus_checksum(b));
    CHECK(corpus_checksum(a) != corpus_checksum(c));
    CHECK(hex64(0x1fULL) == "000000000000001f");
}
