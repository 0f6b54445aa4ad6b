#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "pob/error.hpp"
#include "pob/phoneme.hpp"
#include "pob/util.hpp"

using namespace pob;

namespace {

Lexicon parse(const std::string& text, LexiconOptions options = {}) {
  std::istringstream in(text);
  return load_lexicon(in, options);
}

const Lexicon& toy() {
  static const Lexicon lex = load_lexicon_file(POB_DATA_DIR "/toy_cmudict.dict");
  return lex;
}

PhonemeSeq random_seq(Rng& rng, std::size_t max_len, std::size_t alphabet) {
  static const char* symbols[] = {"AA", "B", "K", "S", "T", "UW"};
  PhonemeSeq s;
  const std::size_t n = uniform_index(rng, max_len + 1);
  for (std::size_t i = 0; i < n; ++i) s.tokens.push_back(symbols[uniform_index(rng, alphabet)]);
  return s;
}

}  // namespace

TEST_CASE("load_lexicon parses entries, comments and stress") {
  const auto lex = parse(";;; comment\nBLUE  B L UW1\n");
  REQUIRE(lex.size() == 1);
  CHECK(lex.primary("blue") == PhonemeSeq::parse("B L UW"));
  CHECK(lex.inventory() == std::set<std::string>{"B", "L", "UW"});

  const auto stressed = parse("BLUE  B L UW1\n", {.strip_stress = false});
  CHECK(stressed.primary("blue").str() == "B L UW1");
}

TEST_CASE("load_lexicon variants") {
  const auto folded = parse("ON  AA1 N\nON(2)  AO1 N\n", {.include_variants = true});
  const auto* v = folded.variants("on");
  REQUIRE(v != nullptr);
  REQUIRE(v->size() == 2);
  CHECK((*v)[0].str() == "AA N");
  CHECK((*v)[1].str() == "AO N");

  const auto dropped = parse("ON  AA1 N\nON(2)  AO1 N\n");
  CHECK(dropped.variants("on")->size() == 1);
  CHECK(dropped.inventory().count("AO") == 0);
}

TEST_CASE("load_lexicon edge cases") {
  const auto empty = parse("");
  CHECK(empty.empty());
  CHECK(empty.inventory().empty());

  CHECK(parse("HELLO  HH AH0 L OW1  # greeting\n").primary("hello").str() == "HH AH L OW");
  CHECK_THROWS_AS(parse("BLUE  B L UW1\nGLUE\n"), ParseError);
  try {
    parse(";;; x\nBLUE  B L UW1\nGLUE\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse("BLUE  B l UW1\n"), ParseError);
  CHECK_THROWS_AS(parse("BLUE  B L? UW\n"), ParseError);
  CHECK_THROWS_AS(load_lexicon_file("/nonexistent/dict"), IoError);
}

TEST_CASE("Lexicon constructor enforces invariants") {
  Lexicon::Entries bad;
  bad["x"] = {};
  CHECK_THROWS(Lexicon(bad));
  Lexicon::Entries e;
  e["blue"] = {PhonemeSeq::parse("B L UW")};
  CHECK_THROWS(Lexicon(e, {"B", "L"}));
  CHECK_NOTHROW(Lexicon(e, {"B", "L", "UW"}));
}

TEST_CASE("phonemize") {
  const auto lex = parse("BLUE  B L UW1\n");
  CHECK(phonemize(TokenSeq::parse("blue"), lex).str() == "B L UW");
  CHECK(phonemize(TokenSeq::parse("BLUE Blue"), lex).str() == "B L UW B L UW");
  CHECK_THROWS_AS(phonemize(TokenSeq::parse("zzxq"), lex), OovError);
  try {
    phonemize(TokenSeq::parse("blue zzxq"), lex);
  } catch (const OovError& e) {
    CHECK(e.word() == "zzxq");
  }
  const auto fb = phonemize(TokenSeq::parse("blue zzxq"), lex, true);
  CHECK(fb.size() == 3 + fallback_pronunciation("zzxq").size());

  CHECK(phonemize(TokenSeq::parse("turn the light on"), toy()).str() ==
        "T ER N DH AH L AY T AA N");
}

TEST_CASE("fallback pronunciation") {
  CHECK(fallback_pronunciation("ship").str() == "SH IH P");
  CHECK(fallback_pronunciation("cat").str() == "K AE T");
  CHECK(fallback_pronunciation("a-b").size() == 2);
  CHECK(fallback_pronunciation("").empty());
}

TEST_CASE("dictionary round trip: phonemize(word) is the parsed primary") {
  std::size_t checked = 0;
  for (const auto& [word, variants] : toy().entries()) {
    CHECK(phonemize(TokenSeq{{word}}, toy()) == variants.front());
    if (++checked == 500) break;
  }
}

TEST_CASE("levenshtein examples") {
  const auto s = PhonemeSeq::parse("T ER N");
  CHECK(levenshtein(s, s) == 0);
  CHECK(levenshtein(PhonemeSeq::parse("B L UW"), PhonemeSeq::parse("G L UW")) == 1);
  CHECK(levenshtein(s, PhonemeSeq{}) == 3);
  CHECK(levenshtein(PhonemeSeq{}, s) == 3);
  CHECK(levenshtein(PhonemeSeq::parse("K AE T"), PhonemeSeq::parse("AE K T")) == 2);
}

TEST_CASE("levenshtein metric properties on random triples") {
  auto rng = make_rng(123);
  for (int t = 0; t < 2000; ++t) {
    const auto a = random_seq(rng, 8, 4), b = random_seq(rng, 8, 4), c = random_seq(rng, 8, 4);
    const auto ab = levenshtein(a, b);
    CHECK(levenshtein(a, a) == 0);
    CHECK((ab == 0) == (a == b));
    CHECK(ab == levenshtein(b, a));
    CHECK(levenshtein(a, c) <= ab + levenshtein(b, c));
    const auto gap = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
    CHECK(ab >= gap);
    CHECK(ab <= std::max(a.size(), b.size()));
  }
}

TEST_CASE("first_diff_index") {
  const auto a = PhonemeSeq::parse("T ER N DH");
  CHECK(first_diff_index(a, a) == 4);
  CHECK(first_diff_index(PhonemeSeq::parse("AA N"), PhonemeSeq::parse("AO F")) == 0);
  CHECK(first_diff_index(PhonemeSeq::parse("AA N"), PhonemeSeq::parse("AA N F")) == 2);
  CHECK(first_diff_index(phonemize(TokenSeq::parse("turn the light on"), toy()),
                         phonemize(TokenSeq::parse("turn the light off"), toy())) == 8);

  auto rng = make_rng(9);
  for (int t = 0; t < 1000; ++t) {
    const auto x = random_seq(rng, 6, 2), y = random_seq(rng, 6, 2);
    const auto d = first_diff_index(x, y);
    CHECK(d == first_diff_index(y, x));
    CHECK(d <= std::min(x.size(), y.size()));
    for (std::size_t i = 0; i < d; ++i) CHECK(x[i] == y[i]);
    if (d < std::min(x.size(), y.size())) CHECK(x[d] != y[d]);
  }
}

TEST_CASE("is_partial_overlap") {
  const auto x = TokenSeq::parse("turn the light on");
  CHECK(is_partial_overlap(x, TokenSeq::parse("turn the light")));
  CHECK(is_partial_overlap(x, TokenSeq::parse("Turn THE light")));
  CHECK_FALSE(is_partial_overlap(x, x));
  CHECK_FALSE(is_partial_overlap(x, TokenSeq::parse("turn the lamp")));
  CHECK_FALSE(is_partial_overlap(TokenSeq::parse("turn"), x));

  auto rng = make_rng(4);
  const std::vector<std::string> vocab = {"a", "b", "c"};
  for (int t = 0; t < 500; ++t) {
    TokenSeq p, q;
    for (std::size_t i = 0, n = 1 + uniform_index(rng, 4); i < n; ++i)
      p.words.push_back(vocab[uniform_index(rng, 3)]);
    for (std::size_t i = 0, n = 1 + uniform_index(rng, 4); i < n; ++i)
      q.words.push_back(vocab[uniform_index(rng, 3)]);
    if (is_partial_overlap(p, q)) CHECK(first_diff_index(p, q) == q.size());
  }
}

TEST_CASE("phonetic_neighbors") {
  const auto lex = parse(
      "BLUE  B L UW1\nGLUE  G L UW1\nCLUE  K L UW1\nBLEW  B L UW1\nZEBRA  Z IY1 B R AH0\n"
      "BLUES  B L UW1 Z\n");
  const auto n = phonetic_neighbors("blue", lex, 1);
  REQUIRE(n.size() == 4);
  CHECK(n[0] == Neighbor{"blew", 0});
  CHECK(n[1] == Neighbor{"blues", 1});
  CHECK(n[2] == Neighbor{"clue", 1});
  CHECK(n[3] == Neighbor{"glue", 1});
  CHECK(phonetic_neighbors("blew", lex, 0) == std::vector<Neighbor>{{"blue", 0}});
  CHECK(phonetic_neighbors("zebra", lex, 0).empty());
  CHECK(phonetic_neighbors("blue", lex, 1, 2).size() == 2);
  CHECK_THROWS_AS(phonetic_neighbors("nope", lex, 1), OovError);
}

TEST_CASE("phonetic_neighbors matches an all-pairs sort oracle") {
  const auto lex = parse(
      "CAT  K AE1 T\nBAT  B AE1 T\nCAST  K AE1 S T\nTACK  T AE1 K\nACT  AE1 K T\n");
  for (const auto& [word, v] : lex.entries()) {
    for (std::size_t r = 0; r <= 4; ++r) {
      std::vector<Neighbor> oracle;
      for (const auto& [other, ov] : lex.entries()) {
        if (other == word) continue;
        const auto d = edit_distance<std::string>(v.front().tokens, ov.front().tokens);
        if (d <= r) oracle.push_back({other, d});
      }
      std::sort(oracle.begin(), oracle.end());
      CHECK(phonetic_neighbors(word, lex, r) == oracle);
    }
  }
}

TEST_CASE("NeighborIndex agrees with direct search") {
  const std::vector<std::string> words = {"blue", "light", "turn", "on"};
  const NeighborIndex index(toy(), words, 2);
  for (const auto& w : words) CHECK(index.neighbors(w) == phonetic_neighbors(w, toy(), 2));
  CHECK_THROWS_AS(index.neighbors("glue"), OovError);
}
