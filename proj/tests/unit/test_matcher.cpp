#include <cmath>

#include "doctest.h"
#include "pob/error.hpp"
#include "pob/gradcheck.hpp"
#include "pob/matcher.hpp"

using namespace pob;

namespace {

MatcherConfig small(ScorerKind kind, double sigma = 0.0) {
  MatcherConfig c;
  c.vocab_size = 6;
  c.embed_dim = 3;
  c.max_positions = 5;
  c.frame_dup = 2;
  c.noise_sigma = sigma;
  c.scorer_kind = kind;
  return c;
}

// Straightforward re-derivation of the forward pass used as an oracle.
double naive_logit(const Example& ex, const MatcherParams& p, const MatcherConfig& c) {
  const std::size_t D = c.embed_dim;
  std::vector<std::vector<double>> audio;
  for (const int q : ex.query)
    for (std::size_t r = 0; r < c.frame_dup; ++r) {
      std::vector<double> u(D);
      for (std::size_t d = 0; d < D; ++d) u[d] = p.audio_projection(d, q);
      audio.push_back(u);
    }
  double z = p.bias, eps_sum = 0.0;
  for (std::size_t i = 0; i < ex.anchor.size(); ++i) {
    std::vector<double> e(D), s(audio.size()), ctx(D, 0.0);
    for (std::size_t d = 0; d < D; ++d) e[d] = p.text_embedding(ex.anchor[i], d);
    double mx = -1e300, tot = 0.0;
    for (std::size_t f = 0; f < audio.size(); ++f) {
      s[f] = 0;
      for (std::size_t d = 0; d < D; ++d) s[f] += e[d] * audio[f][d];
      s[f] /= std::sqrt(double(D));
      mx = std::max(mx, s[f]);
    }
    for (auto& v : s) tot += (v = std::exp(v - mx));
    for (std::size_t f = 0; f < audio.size(); ++f)
      for (std::size_t d = 0; d < D; ++d) ctx[d] += s[f] / tot * audio[f][d];
    for (std::size_t d = 0; d < D; ++d) {
      const double x = e[d] * ctx[d];
      if (c.scorer_kind == ScorerKind::Baseline)
        z += p.scorer(i, d) * x;
      else
        eps_sum += p.scorer(0, d) * x;
    }
  }
  if (c.scorer_kind == ScorerKind::Eps) z += eps_sum / double(ex.anchor.size());
  return z;
}

}  // namespace

TEST_CASE("vocabulary") {
  PhonemeVocabulary v({"UW", "B", "L", "B"});
  CHECK(v.vocab_size() == 4);
  CHECK(v.id("B") == 1);
  CHECK(v.id("UW") == 3);
  CHECK(v.encode(PhonemeSeq::parse("B L UW")) == std::vector<int>{1, 2, 3});
  CHECK_THROWS_AS(v.id("G"), VocabularyError);
}

TEST_CASE("parameter shapes and counts") {
  for (const auto kind : {ScorerKind::Baseline, ScorerKind::Eps}) {
    auto c = small(kind);
    c.embed_dim = 16;
    c.max_positions = 25;
    auto rng = make_rng(1);
    const auto p = init_params(c, rng);
    CHECK(p.text_embedding.rows() == 6);
    CHECK(p.audio_projection.cols() == 6);
    CHECK(p.scorer_parameter_count() == (kind == ScorerKind::Eps ? 16u + 1 : 25u * 16 + 1));
    for (const double v : p.text_embedding.values()) CHECK(std::abs(v) <= 0.1);
  }
  MatcherConfig bad;
  bad.vocab_size = 1;
  CHECK_THROWS_AS(bad.validate(), VocabularyError);
}

TEST_CASE("encoders validate ids and lengths") {
  const auto c = small(ScorerKind::Eps);
  auto rng = make_rng(2);
  const auto p = init_params(c, rng);
  const std::vector<int> too_long(6, 1), pad = {0}, big = {6};
  CHECK_THROWS_AS(encode_text(too_long, p, c), LengthError);
  CHECK_THROWS_AS(encode_text(pad, p, c), VocabularyError);
  CHECK_THROWS_AS(encode_text(big, p, c), VocabularyError);
  const std::vector<int> a = {1, 2};
  const auto t = encode_text(a, p, c);
  CHECK(t.rows() == 5);
  for (std::size_t d = 0; d < 3; ++d) CHECK(t(4, d) == 0.0);
  CHECK(encode_audio(a, p, c, Matrix{}).rows() == 4);
  CHECK_THROWS_AS(align(t, 2, Matrix(0, 3), c), AlignmentError);
}

TEST_CASE("forward pass matches a naive oracle") {
  auto rng = make_rng(3);
  for (const auto kind : {ScorerKind::Baseline, ScorerKind::Eps}) {
    const auto c = small(kind);
    const auto p = init_params(c, rng, 0.8);
    for (int t = 0; t < 20; ++t) {
      Example ex;
      for (std::size_t i = 0, n = 1 + uniform_index(rng, 5); i < n; ++i)
        ex.anchor.push_back(1 + int(uniform_index(rng, 5)));
      for (std::size_t i = 0, n = 1 + uniform_index(rng, 5); i < n; ++i)
        ex.query.push_back(1 + int(uniform_index(rng, 5)));
      const auto tr = forward(ex, p, c, Matrix{});
      CHECK(tr.logit == doctest::Approx(naive_logit(ex, p, c)).epsilon(1e-12));
      CHECK(tr.probability == doctest::Approx(1.0 / (1.0 + std::exp(-tr.logit))));
      CHECK(tr.aligned_features.valid_length == ex.anchor.size());
      for (std::size_t i = ex.anchor.size(); i < c.max_positions; ++i)
        for (std::size_t d = 0; d < c.embed_dim; ++d)
          CHECK(tr.aligned_features.features(i, d) == 0.0);
    }
  }
}

TEST_CASE("eps permutation invariance and length independence") {
  auto c = small(ScorerKind::Eps);
  MatcherParams p{Matrix(6, 3), Matrix(3, 6), Matrix(1, 3), 0.5};
  p.scorer(0, 0) = 2.0;
  p.scorer(0, 1) = -1.0;
  p.scorer(0, 2) = 0.25;
  // Dyadic features make every partial sum exact, so equality is bitwise.
  AlignedFeatureSample s{Matrix(5, 3), 4};
  auto rng = make_rng(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t d = 0; d < 3; ++d) s.features(i, d) = double(int(uniform_index(rng, 17)) - 8) / 4;
  const double z = score(s, p, c);
  AlignedFeatureSample perm = s;
  for (int t = 0; t < 10; ++t) {
    const auto i = uniform_index(rng, 4), j = uniform_index(rng, 4);
    for (std::size_t d = 0; d < 3; ++d) std::swap(perm.features(i, d), perm.features(j, d));
    CHECK(score(perm, p, c) == z);
  }
  c.max_positions = 9;
  AlignedFeatureSample longer{Matrix(9, 3), 4};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t d = 0; d < 3; ++d) longer.features(i, d) = s.features(i, d);
  CHECK(score(longer, p, c) == z);
}

TEST_CASE("baseline padding contract") {
  auto c = small(ScorerKind::Baseline);
  auto rng = make_rng(5);
  auto p = init_params(c, rng, 1.0);
  AlignedFeatureSample s{Matrix(5, 3), 2};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t d = 0; d < 3; ++d) s.features(i, d) = uniform_real(rng, -1, 1);
  const double z = score(s, p, c);
  for (std::size_t d = 0; d < 3; ++d) p.scorer(4, d) += 100.0;  // weights of padded rows
  CHECK(score(s, p, c) == z);
  s.features(4, 0) = 1.0;  // a nonzero padded row would leak into the score
  CHECK(score(s, p, c) != z);
}

TEST_CASE("scale covariance of the decision") {
  auto rng = make_rng(6);
  for (const auto kind : {ScorerKind::Baseline, ScorerKind::Eps}) {
    const auto c = small(kind);
    auto p = init_params(c, rng, 1.0);
    AlignedFeatureSample s{Matrix(5, 3), 3};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t d = 0; d < 3; ++d) s.features(i, d) = uniform_real(rng, -1, 1);
    const double z = score(s, p, c);
    auto q = p;
    for (auto& v : q.scorer.values()) v *= 4.0;
    q.bias *= 4.0;
    CHECK(score(s, q, c) == doctest::Approx(4.0 * z));
    CHECK((score(s, q, c) >= 0) == (z >= 0));
  }
}

TEST_CASE("frozen-noise determinism") {
  const auto c = small(ScorerKind::Eps, 0.1);
  auto rng = make_rng(7);
  const auto p = init_params(c, rng);
  const Example ex{{1, 2, 3}, {1, 2}, true};
  auto n1 = make_rng(9), n2 = make_rng(9);
  const auto a = sample_audio_noise(2, c, n1), b = sample_audio_noise(2, c, n2);
  CHECK(a == b);
  CHECK(a.rows() == 4);
  CHECK(forward(ex, p, c, a).logit == forward(ex, p, c, b).logit);
  CHECK(sample_audio_noise(2, small(ScorerKind::Eps, 0.0), n1).empty());
}

TEST_CASE("analytic gradients match finite differences") {
  GradCheckSuiteOptions o;
  o.configs = 8;
  o.seed = 3;
  for (const auto& k : run_gradcheck_suite(o)) {
    CHECK(k.result.blocks.size() == 4);
    CHECK(k.result.passed(1e-4));
  }
}

TEST_CASE("loss_and_grad loss equals batch_loss") {
  const auto c = small(ScorerKind::Baseline);
  auto rng = make_rng(8);
  const auto p = init_params(c, rng, 0.5);
  const std::vector<Example> batch = {{{1, 2}, {1, 2}, true}, {{3, 4, 5}, {2}, false}};
  const auto lg = loss_and_grad(batch, p, c, std::span<const Matrix>{});
  CHECK(lg.loss == doctest::Approx(batch_loss(batch, p, c, {})).epsilon(1e-14));
}

TEST_CASE("model files and exports") {
  const auto c = small(ScorerKind::Eps, 0.1);
  auto rng = make_rng(10);
  const Model model{c, PhonemeVocabulary({"AA", "B", "K", "S", "T"}), init_params(c, rng)};
  const auto text = model_to_string(model);
  CHECK(model_from_string(text) == model);
  CHECK(model_to_string(model_from_string(text)) == text);
  CHECK_THROWS_AS(model_from_string("{}"), FormatError);
  CHECK_THROWS_AS(model_from_string("nope"), FormatError);

  const auto w = export_scoring_weights(model.params, c);
  CHECK(w.positions() == 5);
  for (std::size_t i = 1; i < 5; ++i)
    for (std::size_t d = 0; d < 3; ++d) CHECK(w.rows(i, d) == w.rows(0, d));

  PairRecord r;
  r.anchor_phonemes = PhonemeSeq::parse("B AA T");
  r.query_phonemes = PhonemeSeq::parse("B AA");
  std::vector<PairRecord> recs(3, r);
  recs[2].anchor_phonemes = PhonemeSeq::parse("B AA T S K AA");  // longer than m
  bool truncated = false;
  const auto f1 = export_aligned_features(model, recs, 10, 1, &truncated);
  CHECK(truncated);
  CHECK(f1.size() == 2);
  const auto f2 = export_aligned_features(model, recs, 10, 1);
  CHECK(f1[0].features == f2[0].features);
  CHECK(export_aligned_features(model, recs, 1, 4).size() <= 1);
}
