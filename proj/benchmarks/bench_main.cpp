#include <benchmark/benchmark.h>

#include "pob/generator.hpp"
#include "pob/matcher.hpp"
#include "pob/metrics.hpp"
#include "pob/phoneme.hpp"

using namespace pob;

namespace {

PhonemeSeq random_seq(Rng& rng, std::size_t n) {
  static const char* sym[] = {"AA", "B", "K", "S", "T", "IY", "N", "L"};
  PhonemeSeq s;
  for (std::size_t i = 0; i < n; ++i) s.tokens.emplace_back(sym[uniform_index(rng, 8)]);
  return s;
}

void BM_Levenshtein(benchmark::State& state) {
  auto rng = make_rng(1);
  const auto a = random_seq(rng, std::size_t(state.range(0)));
  const auto b = random_seq(rng, std::size_t(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(levenshtein(a, b));
}
BENCHMARK(BM_Levenshtein)->Arg(5)->Arg(12)->Arg(25);

void BM_ForwardBackward(benchmark::State& state) {
  MatcherConfig c;
  c.vocab_size = 70;
  c.embed_dim = std::size_t(state.range(0));
  c.scorer_kind = state.range(1) ? ScorerKind::Eps : ScorerKind::Baseline;
  auto rng = make_rng(2);
  const auto p = init_params(c, rng);
  std::vector<Example> batch(64);
  for (auto& ex : batch) {
    for (int i = 0; i < 20; ++i) ex.anchor.push_back(1 + int(uniform_index(rng, 69)));
    ex.query = ex.anchor;
    ex.label = true;
  }
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_grad(batch, p, c, rng).loss);
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_ForwardBackward)->Args({16, 0})->Args({16, 1})->Args({32, 1});

void BM_Metrics(benchmark::State& state) {
  auto rng = make_rng(3);
  std::vector<ScoreEntry> s;
  for (std::int64_t i = 0; i < state.range(0); ++i)
    s.push_back({std::to_string(i), uniform_real(rng, 0, 1), uniform_index(rng, 2) == 1});
  s[0].label = true;
  s[1].label = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eer(s));
    benchmark::DoNotOptimize(auc(s));
  }
}
BENCHMARK(BM_Metrics)->Arg(1000)->Arg(100000);

void BM_SparkGeneration(benchmark::State& state) {
  const auto lex = load_lexicon_file(POB_DATA_DIR "/toy_cmudict.dict");
  const auto words = read_word_list(POB_DATA_DIR "/common_words.txt");
  SparkConfig c;
  c.n_pairs = std::size_t(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_spark(lex, words, c).records.size());
}
BENCHMARK(BM_SparkGeneration)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
