#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pob {

/// Ordered phoneme tokens (ARPABET symbols, stress stripped by default).
struct PhonemeSeq {
  std::vector<std::string> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens[i]; }
  auto begin() const noexcept { return tokens.begin(); }
  auto end() const noexcept { return tokens.end(); }

  /// Space-joined symbols, e.g. "B L UW".
  std::string str() const;
  static PhonemeSeq parse(std::string_view text);

  auto operator<=>(const PhonemeSeq&) const = default;
};

/// Whitespace-tokenized, lowercased word sequence.
struct TokenSeq {
  std::vector<std::string> words;

  std::size_t size() const noexcept { return words.size(); }
  bool empty() const noexcept { return words.empty(); }
  const std::string& operator[](std::size_t i) const { return words[i]; }
  auto begin() const noexcept { return words.begin(); }
  auto end() const noexcept { return words.end(); }

  /// Single-space joined words.
  std::string text() const;
  static TokenSeq parse(std::string_view text);

  auto operator<=>(const TokenSeq&) const = default;
};

std::string to_lower(std::string_view s);

struct LexiconOptions {
  bool strip_stress = true;
  bool include_variants = false;
};

/// Immutable word -> pronunciation variants mapping. The first variant of a
/// word is its primary pronunciation.
class Lexicon {
 public:
  using Entries = std::map<std::string, std::vector<PhonemeSeq>, std::less<>>;

  Lexicon() = default;
  /// Validates that no word has an empty variant list and that every symbol
  /// is in the inventory. An empty inventory means "derive from entries".
  explicit Lexicon(Entries entries, std::set<std::string> inventory = {});

  bool contains(std::string_view word) const;
  /// Null when the word is absent.
  const std::vector<PhonemeSeq>* variants(std::string_view word) const;
  /// Throws OovError when the word is absent.
  const PhonemeSeq& primary(std::string_view word) const;

  const Entries& entries() const noexcept { return entries_; }
  const std::set<std::string>& inventory() const noexcept { return inventory_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  Entries entries_;
  std::set<std::string> inventory_;
};

/// Parses CMU Pronouncing Dictionary text: ";;;" comment lines, entry lines
/// "WORD  PH PH ...", variant lines "WORD(2)  PH ...". A trailing "# ..."
/// annotation (newer cmudict releases) is ignored.
Lexicon load_lexicon(std::istream& in, const LexiconOptions& options = {});
Lexicon load_lexicon_file(const std::filesystem::path& path,
                          const LexiconOptions& options = {});

/// Naive greedy letter-to-phoneme rule used for out-of-vocabulary words when
/// fallback is enabled. Digraphs (ch, sh, th, ng, ph, ck, ee, oo, qu) are
/// matched before single letters; non-letters are skipped.
PhonemeSeq fallback_pronunciation(std::string_view word);

/// Concatenates the primary pronunciation of each word. Throws OovError on
/// an unknown word unless fallback is set.
PhonemeSeq phonemize(const TokenSeq& phrase, const Lexicon& lexicon,
                     bool fallback = false);

/// Unit-cost edit distance over any equality-comparable element type.
template <class T>
std::size_t edit_distance(std::span<const T> a, std::span<const T> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t levenshtein(const PhonemeSeq& a, const PhonemeSeq& b);

/// Smallest index where the sequences differ; the shorter length when one is
/// a prefix of the other (including equal sequences).
template <class T>
std::size_t first_diff(std::span<const T> a, std::span<const T> b) {
  const std::size_t n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return i;
}

std::size_t first_diff_index(const PhonemeSeq& a, const PhonemeSeq& b);

/// Word-level first difference (case-folded).
std::size_t first_diff_index(const TokenSeq& a, const TokenSeq& b);

/// True iff y is a strict word-level prefix of x (case-folded).
bool is_partial_overlap(const TokenSeq& x, const TokenSeq& y);

struct Neighbor {
  std::string word;
  std::size_t distance = 0;
  auto operator<=>(const Neighbor&) const = default;
};

inline constexpr std::size_t kNoLimit = std::numeric_limits<std::size_t>::max();

/// Other lexicon words whose primary pronunciation lies within max_distance
/// of the query word's primary, ordered by (distance, word). Throws OovError
/// when the word is not in the lexicon.
std::vector<Neighbor> phonetic_neighbors(std::string_view word,
                                         const Lexicon& lexicon,
                                         std::size_t max_distance,
                                         std::size_t limit = kNoLimit);

/// Precomputed phonetic_neighbors for a set of query words, for generators
/// that look up the same words many times.
class NeighborIndex {
 public:
  NeighborIndex(const Lexicon& lexicon, std::span<const std::string> words,
                std::size_t max_distance);

  /// Throws OovError for words that were not indexed.
  const std::vector<Neighbor>& neighbors(std::string_view word) const;
  std::size_t max_distance() const noexcept { return max_distance_; }

 private:
  std::size_t max_distance_;
  std::map<std::string, std::vector<Neighbor>, std::less<>> table_;
};

}  // namespace pob
