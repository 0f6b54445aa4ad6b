#include "pob/study.hpp"

#include <set>

#include "pob/error.hpp"

namespace pob {
namespace {

std::size_t draw_budget(const BiasStudyConfig& c, Rng& rng) {
  if (uniform_real(rng, 0.0, 1.0) < c.short_share)
    return c.min_budget + uniform_index(rng, c.short_budget_max - c.min_budget + 1);
  return c.short_budget_max + 1 + uniform_index(rng, c.l_max - c.short_budget_max);
}

bool share_word(const TokenSeq& a, const TokenSeq& b) {
  const std::set<std::string> words(a.words.begin(), a.words.end());
  for (const auto& w : b.words)
    if (words.count(w)) return true;
  return false;
}

std::vector<PairRecord> matched_split(const Lexicon& lexicon, std::span<const std::string> pool,
                                      const BiasStudyConfig& c, std::size_t n, Rng& rng,
                                      const std::string& tag) {
  std::vector<PairRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string salt = tag + std::to_string(i);
    const auto a = build_phrase(lexicon, pool, draw_budget(c, rng), rng);
    if (i % 2 == 0) {
      out.push_back(make_record(a, a, true, Source::BiasStudy, lexicon, "pos", salt));
      continue;
    }
    TokenSeq b;
    do {
      b = build_phrase(lexicon, pool, draw_budget(c, rng), rng);
    } while (share_word(a, b));
    out.push_back(make_record(a, b, false, Source::BiasStudy, lexicon, "neg", salt));
  }
  shuffle(out, rng);
  return out;
}

}  // namespace

BiasStudyData build_bias_study(const Lexicon& lexicon, std::span<const std::string> word_pool,
                               const BiasStudyConfig& c) {
  if (c.min_budget < 2 || c.short_budget_max < c.min_budget || c.l_max <= c.short_budget_max)
    throw GenerationError("need 2 <= min_budget <= short_budget_max < l_max");
  if (c.min_overlap_prefix + 2 >= c.l_max)
    throw GenerationError("min_overlap_prefix leaves no room for extra words under l_max");

  BiasStudyData data;
  auto train_rng = make_rng(c.seed, 0);
  auto val_rng = make_rng(c.seed, 1);
  auto ovl_rng = make_rng(c.seed, 2);
  data.train = matched_split(lexicon, word_pool, c, c.train_records, train_rng, "t");
  data.val = matched_split(lexicon, word_pool, c, c.val_records, val_rng, "v");

  // Query budget leaves at least two phonemes of room for the extension.
  const std::size_t q_lo = c.min_overlap_prefix + 1;
  const std::size_t q_hi = c.l_max - 2;
  std::size_t attempts = 0;
  const std::size_t max_attempts = 1000 * (c.overlap_queries + 1);
  while (data.overlap.size() < 2 * c.overlap_queries) {
    if (++attempts > max_attempts)
      throw GenerationError("could not build enough partial-overlap queries");
    const auto q = build_phrase(lexicon, word_pool, q_lo + uniform_index(ovl_rng, q_hi - q_lo + 1),
                                ovl_rng);
    const std::size_t q_len = phonemize(q, lexicon).size();
    if (q_len < c.min_overlap_prefix || q_len + 1 >= c.l_max) continue;
    TokenSeq extra;
    try {
      extra = build_phrase(lexicon, word_pool, c.l_max - q_len, ovl_rng);
    } catch (const GenerationError&) {
      continue;
    }
    TokenSeq a = q;
    a.words.insert(a.words.end(), extra.words.begin(), extra.words.end());
    const std::string salt = "o" + std::to_string(data.overlap.size() / 2);
    data.overlap.push_back(make_record(a, q, false, Source::BiasStudy, lexicon, "ovl-neg", salt));
    data.overlap.push_back(make_record(a, a, true, Source::BiasStudy, lexicon, "ovl-pos", salt));
  }
  return data;
}

}  // namespace pob
