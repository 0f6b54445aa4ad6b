#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pob/generator.hpp"
#include "pob/phoneme.hpp"

namespace pob {

/// Synthetic data for measuring prefix bias. Training and validation hold
/// positives (a, a) and negatives whose phrases share no word; the overlap
/// split holds anchors A = Q + extra words scored against Q (negative) and
/// against A itself (positive), and is never used for training.
struct BiasStudyConfig {
  std::size_t train_records = 20000;
  std::size_t val_records = 2000;
  std::size_t overlap_queries = 500;
  std::size_t l_max = 25;  // anchors stay strictly below this many phonemes
  /// Phrase phoneme budgets are drawn from [min_budget, short_budget_max]
  /// with probability short_share, else from (short_budget_max, l_max].
  std::size_t min_budget = 4;
  std::size_t short_budget_max = 12;
  double short_share = 0.75;
  /// Overlap queries have at least this many phonemes, so the first
  /// differing phoneme of (A, Q) is at index >= min_overlap_prefix.
  std::size_t min_overlap_prefix = 10;
  std::uint64_t seed = 0;
};

struct BiasStudyData {
  std::vector<PairRecord> train;
  std::vector<PairRecord> val;
  std::vector<PairRecord> overlap;
};

BiasStudyData build_bias_study(const Lexicon& lexicon, std::span<const std::string> word_pool,
                               const BiasStudyConfig& config);

}  // namespace pob
