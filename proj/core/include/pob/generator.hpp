#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pob/phoneme.hpp"
#include "pob/util.hpp"

namespace pob {

/// Closed integer ranges over first-diff indices, e.g. [0,4],[5,9],...
struct BinSpec {
  struct Range {
    std::size_t lo = 0;
    std::size_t hi = 0;  // inclusive
    auto operator<=>(const Range&) const = default;
  };
  std::vector<Range> ranges;

  /// [0,4],[5,9],[10,14],[15,19],[20,24].
  static BinSpec defaults();
  /// "0-4,5-9,..." Throws FormatError on malformed or overlapping ranges.
  static BinSpec parse(std::string_view text);
  std::string str() const;

  /// Throws FormatError unless ranges are non-empty, sorted and disjoint.
  void validate() const;
  std::optional<std::size_t> bin_of(std::size_t first_diff_index) const;
  std::size_t size() const noexcept { return ranges.size(); }

  bool operator==(const BinSpec&) const = default;
};

struct PhrasePair {
  TokenSeq a;
  TokenSeq b;
  std::size_t substituted_position = 0;
  std::size_t first_diff_index = 0;

  bool operator==(const PhrasePair&) const = default;
};

enum class Source { PobSpark, PobLp, BiasStudy };
std::string_view to_string(Source source);
/// Throws FormatError on an unknown name.
Source source_from_string(std::string_view name);

struct PairRecord {
  std::string id;
  std::string anchor_text;
  std::string query_text;
  PhonemeSeq anchor_phonemes;
  PhonemeSeq query_phonemes;
  std::size_t first_diff_index = 0;
  bool label = false;
  Source source = Source::PobSpark;
  std::optional<std::string> audio_path;

  bool operator==(const PairRecord&) const = default;
};

/// Builds a record from texts, phonemizing both sides. The id is the
/// content hash of (anchor, query, salt) followed by "-<role>".
PairRecord make_record(const TokenSeq& anchor, const TokenSeq& query, bool label,
                       Source source, const Lexicon& lexicon, std::string_view role,
                       std::string_view salt = {}, bool fallback = false);

/// Draws words uniformly from the pool, appending while the running phoneme
/// total stays below l_max; stops at the first draw that would reach it.
/// Throws GenerationError if no pool word fits under l_max.
TokenSeq build_phrase(const Lexicon& lexicon, std::span<const std::string> word_pool,
                      std::size_t l_max, Rng& rng);

/// Replaces one uniformly chosen word by a uniformly chosen phonetic
/// neighbor. Positions without a usable neighbor are retried in random
/// order; throws GenerationError when none has one. Neighbors with identical
/// pronunciation (distance 0) are never used.
PhrasePair make_pair(const TokenSeq& phrase, const Lexicon& lexicon,
                     std::size_t max_distance, Rng& rng);
/// Same draw sequence as above, using a precomputed index.
PhrasePair make_pair(const TokenSeq& phrase, const Lexicon& lexicon,
                     const NeighborIndex& index, Rng& rng);

struct SamplingReport {
  std::vector<std::size_t> available;  // candidates per bin
  std::vector<std::size_t> selected;   // output pairs per bin
  std::vector<std::size_t> skipped_bins;
  std::size_t unbinned = 0;            // candidates outside every bin
  std::vector<std::string> warnings;
};

/// Per bin, draws min(per_bin, available) pairs uniformly without
/// replacement, then shuffles the output. Empty bins are skipped and reported.
std::vector<PhrasePair> sample_uniform_first_diff(std::span<const PhrasePair> pairs,
                                                  const BinSpec& bins,
                                                  std::size_t per_bin, Rng& rng,
                                                  SamplingReport* report = nullptr);
/// Variant with one quota per bin.
std::vector<PhrasePair> sample_uniform_first_diff(std::span<const PhrasePair> pairs,
                                                  const BinSpec& bins,
                                                  std::span<const std::size_t> quotas,
                                                  Rng& rng,
                                                  SamplingReport* report = nullptr);

/// (anchor, query, label) = (a,b,false), (b,a,false), (a,a,true).
std::array<PairRecord, 3> expand_tuples(const PhrasePair& pair, const Lexicon& lexicon);

struct LpRow {
  TokenSeq anchor;
  TokenSeq query;
  bool label = false;
  std::optional<std::string> audio_path;
};

struct LpOptions {
  bool fallback = false;
  std::size_t max_retries = 32;
};

struct LpReport {
  std::size_t positives = 0;
  std::size_t ignored_negatives = 0;
  std::size_t mismatched_positives = 0;  // label true but texts differ
  std::size_t duplicates = 0;
  std::size_t retries = 0;
};

/// For every positive row emits the row itself and a negative whose anchor
/// has one common word appended, so the query becomes a strict word-level
/// prefix of the anchor.
std::vector<PairRecord> generate_pob_lp(std::span<const LpRow> rows,
                                        std::span<const std::string> common_words,
                                        const Lexicon& lexicon, Rng& rng,
                                        const LpOptions& options = {},
                                        LpReport* report = nullptr);

struct SparkConfig {
  std::size_t n_pairs = 1000;
  std::size_t l_max = 25;
  std::size_t max_distance = 2;
  BinSpec bins = BinSpec::defaults();
  /// When unset, n_pairs is spread evenly over the bins.
  std::optional<std::size_t> per_bin;
  std::uint64_t seed = 0;
  /// Candidate attempts = n_pairs * candidate_factor.
  std::size_t candidate_factor = 20;
  /// Candidate generation streams; part of the reproducibility key.
  std::size_t shards = 1;
};

struct SparkReport {
  std::size_t candidates = 0;
  std::size_t duplicates = 0;
  std::size_t retries = 0;  // failed make_pair attempts
  SamplingReport sampling;
};

struct SparkResult {
  std::vector<PairRecord> records;
  SparkReport report;
};

/// Full text-side POB-Spark pipeline: phrase construction, neighbor
/// substitution, first-diff-uniform sampling, and tuple expansion.
SparkResult generate_spark(const Lexicon& lexicon, std::span<const std::string> word_pool,
                           const SparkConfig& config);

}  // namespace pob
