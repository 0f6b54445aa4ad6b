#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "pob/error.hpp"
#include "pob/generator.hpp"
#include "pob/manifest.hpp"

using namespace pob;

namespace {

Lexicon parse(const std::string& text) {
  std::istringstream in(text);
  return load_lexicon(in);
}

const Lexicon& toy() {
  static const Lexicon lex = load_lexicon_file(POB_DATA_DIR "/toy_cmudict.dict");
  return lex;
}

const std::vector<std::string>& pool() {
  static const auto words = read_word_list(POB_DATA_DIR "/common_words.txt");
  return words;
}

PhrasePair pair_with_diff(std::size_t d) { return {TokenSeq{{"x"}}, TokenSeq{{"y"}}, 0, d}; }

}  // namespace

TEST_CASE("BinSpec parsing and lookup") {
  const auto d = BinSpec::defaults();
  CHECK(d.str() == "0-4,5-9,10-14,15-19,20-24");
  CHECK(BinSpec::parse(d.str()) == d);
  CHECK(d.bin_of(0) == 0u);
  CHECK(d.bin_of(4) == 0u);
  CHECK(d.bin_of(5) == 1u);
  CHECK(d.bin_of(24) == 4u);
  CHECK_FALSE(d.bin_of(25).has_value());
  CHECK_THROWS_AS(BinSpec::parse(""), FormatError);
  CHECK_THROWS_AS(BinSpec::parse("0-4,3-9"), FormatError);
  CHECK_THROWS_AS(BinSpec::parse("5-4"), FormatError);
  CHECK_THROWS_AS(BinSpec::parse("0-4;5-9"), FormatError);
  CHECK_THROWS_AS(BinSpec::parse("a-4"), FormatError);
}

TEST_CASE("source names") {
  for (const auto s : {Source::PobSpark, Source::PobLp, Source::BiasStudy})
    CHECK(source_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(source_from_string("tts"), FormatError);
}

TEST_CASE("build_phrase budget") {
  const auto lex = parse("A  AH0\nTHE  DH AH0\nBANANA  B AH N AE N AH\n");
  auto rng = make_rng(1);
  const std::vector<std::string> only_a = {"a"};
  CHECK(build_phrase(lex, only_a, 2, rng).words == std::vector<std::string>{"a"});
  CHECK(build_phrase(lex, only_a, 5, rng).size() == 4);

  const std::vector<std::string> big = {"banana"};
  CHECK_THROWS_AS(build_phrase(lex, big, 6, rng), GenerationError);
  CHECK_THROWS_AS(build_phrase(lex, std::vector<std::string>{}, 6, rng), GenerationError);

  for (std::size_t l_max : {2, 5, 10, 25}) {
    for (int t = 0; t < 50; ++t) {
      const auto p = build_phrase(toy(), pool(), l_max, rng);
      CHECK_FALSE(p.empty());
      CHECK(phonemize(p, toy()).size() < l_max);
    }
  }
  auto r1 = make_rng(7), r2 = make_rng(7);
  CHECK(build_phrase(toy(), pool(), 25, r1) == build_phrase(toy(), pool(), 25, r2));
}

TEST_CASE("make_pair") {
  const auto lex = toy();
  auto rng = make_rng(3);
  const auto p = make_pair(TokenSeq::parse("blue"), lex, 1, rng);
  CHECK(p.substituted_position == 0);
  CHECK(p.first_diff_index == first_diff_index(phonemize(p.a, lex), phonemize(p.b, lex)));
  CHECK(levenshtein(lex.primary("blue"), lex.primary(p.b[0])) == 1);

  const auto only_glue = parse("BLUE  B L UW1\nGLUE  G L UW1\nBLEW  B L UW1\n");
  const auto g = make_pair(TokenSeq::parse("blue"), only_glue, 1, rng);
  CHECK(g.b.text() == "glue");  // the homophone "blew" is never used
  CHECK(g.first_diff_index == 0);

  const auto three = TokenSeq::parse("turn the light");
  for (int t = 0; t < 30; ++t) {
    const auto q = make_pair(three, lex, 2, rng);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < 3; ++i) changed += q.a[i] != q.b[i];
    CHECK(changed == 1);
    CHECK(q.a[q.substituted_position] != q.b[q.substituted_position]);
    if (q.substituted_position == 2)
      CHECK(q.first_diff_index >= phonemize(TokenSeq::parse("turn the"), lex).size());
  }

  const auto isolated = parse("ZEBRA  Z IY1 B R AH0\nBLUE  B L UW1\n");
  CHECK_THROWS_AS(make_pair(TokenSeq::parse("zebra blue"), isolated, 1, rng), GenerationError);

  const std::vector<std::string> words = {"turn", "the", "light"};
  const NeighborIndex index(lex, words, 2);
  auto a = make_rng(11), b = make_rng(11);
  CHECK(make_pair(three, lex, 2, a) == make_pair(three, lex, index, b));
}

TEST_CASE("sample_uniform_first_diff counting") {
  std::vector<PhrasePair> pairs;
  for (std::size_t d = 0; d < 25; ++d)
    for (int k = 0; k < 20; ++k) pairs.push_back(pair_with_diff(d));  // 100 per bin
  auto rng = make_rng(5);
  SamplingReport report;
  const auto out = sample_uniform_first_diff(pairs, BinSpec::defaults(), 10, rng, &report);
  CHECK(out.size() == 50);
  CHECK(report.selected == std::vector<std::size_t>(5, 10));
  CHECK(report.available == std::vector<std::size_t>(5, 100));

  std::vector<PhrasePair> gap;
  for (std::size_t d = 0; d < 25; ++d)
    if (d < 10 || d > 14) gap.push_back(pair_with_diff(d));
  gap.push_back(pair_with_diff(40));
  const auto out2 = sample_uniform_first_diff(gap, BinSpec::defaults(), 3, rng, &report);
  CHECK(out2.size() == 12);
  CHECK(report.skipped_bins == std::vector<std::size_t>{2});
  CHECK(report.warnings.size() == 1);
  CHECK(report.unbinned == 1);
  for (const auto& p : out2) CHECK((p.first_diff_index < 10 || p.first_diff_index > 14));

  auto r1 = make_rng(8), r2 = make_rng(8);
  CHECK(sample_uniform_first_diff(pairs, BinSpec::defaults(), 7, r1) ==
        sample_uniform_first_diff(pairs, BinSpec::defaults(), 7, r2));
}

TEST_CASE("expand_tuples") {
  PhrasePair p{TokenSeq::parse("turn the light on"), TokenSeq::parse("turn the light off"), 3, 8};
  const auto r = expand_tuples(p, toy());
  CHECK(r[0].label == false);
  CHECK(r[1].label == false);
  CHECK(r[2].label == true);
  CHECK(r[0].anchor_text == "turn the light on");
  CHECK(r[0].query_text == "turn the light off");
  CHECK(r[1].anchor_text == "turn the light off");
  CHECK(r[1].query_text == "turn the light on");
  CHECK(r[2].anchor_text == r[2].query_text);
  CHECK(r[2].first_diff_index == r[2].anchor_phonemes.size());
  CHECK(r[0].first_diff_index == 8);
  CHECK(r[1].first_diff_index == 8);
  std::set<std::string> ids;
  for (const auto& x : r) {
    ids.insert(x.id);
    CHECK(x.source == Source::PobSpark);
    CHECK_FALSE(x.audio_path.has_value());
  }
  CHECK(ids.size() == 3);
  CHECK(r[0].id.ends_with("-ab"));

  PhrasePair oov{TokenSeq::parse("zzxq"), TokenSeq::parse("blue"), 0, 0};
  CHECK_THROWS_AS(expand_tuples(oov, toy()), OovError);
}

TEST_CASE("generate_pob_lp") {
  const std::vector<LpRow> rows = {
      {TokenSeq::parse("turn the light"), TokenSeq::parse("turn the light"), true, "a.wav"},
      {TokenSeq::parse("open the door"), TokenSeq::parse("close the door"), false, "b.wav"},
      {TokenSeq::parse("good morning"), TokenSeq::parse("good morning"), true, std::nullopt},
      {TokenSeq::parse("turn the light"), TokenSeq::parse("turn the light"), true, "a.wav"},
  };
  const std::vector<std::string> common = {"on"};
  auto rng = make_rng(2);
  LpReport report;
  const auto out = generate_pob_lp(rows, common, toy(), rng, {}, &report);
  REQUIRE(out.size() == 4);
  CHECK(report.positives == 2);
  CHECK(report.ignored_negatives == 1);
  CHECK(report.duplicates == 1);
  CHECK(out[1].anchor_text == "turn the light on");
  CHECK(out[1].query_text == "turn the light");
  CHECK(out[1].label == false);
  CHECK(out[1].audio_path == std::optional<std::string>("a.wav"));
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].source == Source::PobLp);
    if (!out[i].label)
      CHECK(is_partial_overlap(TokenSeq::parse(out[i].anchor_text),
                               TokenSeq::parse(out[i].query_text)));
  }
  CHECK_NOTHROW(validate_records(out));

  const std::vector<std::string> oov_only = {"zzxq"};
  CHECK_THROWS_AS(generate_pob_lp(rows, oov_only, toy(), rng, {}, nullptr), GenerationError);
  LpOptions fb;
  fb.fallback = true;
  CHECK(generate_pob_lp(rows, oov_only, toy(), rng, fb, nullptr).size() == 4);
  CHECK_THROWS_AS(generate_pob_lp(rows, std::vector<std::string>{}, toy(), rng, {}, nullptr),
                  GenerationError);
}

TEST_CASE("generate_spark contract") {
  SparkConfig cfg;
  cfg.n_pairs = 100;
  cfg.seed = 42;
  const auto run = generate_spark(toy(), pool(), cfg);
  CHECK(run.records.size() == 300);
  for (std::size_t i = 0; i + 2 < run.records.size(); i += 3) {
    CHECK_FALSE(run.records[i].label);
    CHECK_FALSE(run.records[i + 1].label);
    CHECK(run.records[i + 2].label);
    CHECK(run.records[i].anchor_text == run.records[i + 1].query_text);
    CHECK(run.records[i].query_text == run.records[i + 1].anchor_text);
  }
  CHECK_NOTHROW(validate_records(run.records));
  CHECK(run.report.sampling.selected == std::vector<std::size_t>(5, 20));
  CHECK(manifest_to_string(generate_spark(toy(), pool(), cfg).records) ==
        manifest_to_string(run.records));

  cfg.shards = 3;
  const auto sharded = generate_spark(toy(), pool(), cfg);
  CHECK(manifest_to_string(generate_spark(toy(), pool(), cfg).records) ==
        manifest_to_string(sharded.records));

  const std::vector<std::string> bad_pool = {"zzxq"};
  CHECK_THROWS_AS(generate_spark(toy(), bad_pool, cfg), OovError);
}
