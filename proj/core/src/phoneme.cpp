#include "pob/phoneme.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>
#include <utility>

#include "pob/error.hpp"

namespace pob {

namespace {

std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])))
      ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

bool valid_symbol(std::string_view s) {
  if (s.empty()) return false;
  std::size_t letters = 0;
  while (letters < s.size() && s[letters] >= 'A' && s[letters] <= 'Z') ++letters;
  if (letters == 0) return false;
  if (letters == s.size()) return true;
  return letters + 1 == s.size() && s.back() >= '0' && s.back() <= '2';
}

std::string strip_stress_digit(std::string s) {
  if (!s.empty() && s.back() >= '0' && s.back() <= '2') s.pop_back();
  return s;
}

// Splits "word(2)" into ("word", true). A bare word yields (word, false).
std::pair<std::string, bool> split_variant(std::string_view head) {
  if (head.size() >= 3 && head.back() == ')') {
    const auto open = head.rfind('(');
    if (open != std::string_view::npos && open > 0 && open + 2 < head.size()) {
      const auto digits = head.substr(open + 1, head.size() - open - 2);
      const bool numeric = std::all_of(digits.begin(), digits.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      });
      if (numeric) return {std::string(head.substr(0, open)), true};
    }
  }
  return {std::string(head), false};
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string PhonemeSeq::str() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

PhonemeSeq PhonemeSeq::parse(std::string_view text) { return {split_ws(text)}; }

std::string TokenSeq::text() const {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

TokenSeq TokenSeq::parse(std::string_view text) {
  auto words = split_ws(text);
  for (auto& w : words) w = to_lower(w);
  return {std::move(words)};
}

Lexicon::Lexicon(Entries entries, std::set<std::string> inventory)
    : entries_(std::move(entries)), inventory_(std::move(inventory)) {
  const bool derive = inventory_.empty();
  for (const auto& [word, variants] : entries_) {
    if (variants.empty())
      throw VocabularyError("lexicon word '" + word + "' has no pronunciation");
    for (const auto& pron : variants) {
      for (const auto& sym : pron) {
        if (derive) {
          inventory_.insert(sym);
        } else if (!inventory_.contains(sym)) {
          throw VocabularyError("symbol '" + sym + "' of word '" + word +
                                "' is not in the inventory");
        }
      }
    }
  }
}

bool Lexicon::contains(std::string_view word) const {
  return entries_.find(word) != entries_.end();
}

const std::vector<PhonemeSeq>* Lexicon::variants(std::string_view word) const {
  const auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

const PhonemeSeq& Lexicon::primary(std::string_view word) const {
  const auto* v = variants(word);
  if (!v) throw OovError(std::string(word));
  return v->front();
}

Lexicon load_lexicon(std::istream& in, const LexiconOptions& options) {
  Lexicon::Entries entries;
  std::set<std::string> inventory;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.starts_with(";;;")) continue;
    std::string_view body(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos)
      body = body.substr(0, hash);
    auto fields = split_ws(body);
    if (fields.empty()) continue;
    if (fields.size() == 1)
      throw ParseError(line_no, "entry '" + fields[0] + "' has no phonemes");

    auto [word, is_variant] = split_variant(fields[0]);
    word = to_lower(word);
    PhonemeSeq pron;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (!valid_symbol(fields[i]))
        throw ParseError(line_no, "invalid phoneme symbol '" + fields[i] + "'");
      pron.tokens.push_back(options.strip_stress ? strip_stress_digit(fields[i])
                                                 : fields[i]);
    }
    if (is_variant && !options.include_variants) continue;
    for (const auto& sym : pron) inventory.insert(sym);
    entries[word].push_back(std::move(pron));
  }
  return Lexicon(std::move(entries), std::move(inventory));
}

Lexicon load_lexicon_file(const std::filesystem::path& path,
                          const LexiconOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dictionary '" + path.string() + "'");
  return load_lexicon(in, options);
}

PhonemeSeq fallback_pronunciation(std::string_view word) {
  static const std::pair<std::string_view, std::string_view> kDigraphs[] = {
      {"ch", "CH"}, {"sh", "SH"}, {"th", "TH"}, {"ng", "NG"}, {"ph", "F"},
      {"ck", "K"},  {"ee", "IY"}, {"oo", "UW"}, {"qu", "K W"}};
  static const std::string_view kLetters[26] = {
      "AE", "B", "K", "D", "EH", "F", "G", "HH", "IH", "JH", "K", "L", "M",
      "N",  "AA", "P", "K", "R", "S", "T", "AH", "V", "W", "K S", "Y", "Z"};
  const std::string w = to_lower(word);
  PhonemeSeq out;
  auto emit = [&out](std::string_view syms) {
    for (auto& s : split_ws(syms)) out.tokens.push_back(std::move(s));
  };
  std::size_t i = 0;
  while (i < w.size()) {
    bool matched = false;
    for (const auto& [graph, syms] : kDigraphs) {
      if (std::string_view(w).substr(i, 2) == graph) {
        emit(syms);
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (w[i] >= 'a' && w[i] <= 'z') emit(kLetters[w[i] - 'a']);
    ++i;
  }
  return out;
}

PhonemeSeq phonemize(const TokenSeq& phrase, const Lexicon& lexicon,
                     bool fallback) {
  PhonemeSeq out;
  for (const auto& raw : phrase) {
    const std::string word = to_lower(raw);
    if (const auto* v = lexicon.variants(word)) {
      out.tokens.insert(out.tokens.end(), v->front().begin(), v->front().end());
      continue;
    }
    if (!fallback) throw OovError(word);
    auto guess = fallback_pronunciation(word);
    if (guess.empty()) throw OovError(word);
    out.tokens.insert(out.tokens.end(), guess.begin(), guess.end());
  }
  return out;
}

std::size_t levenshtein(const PhonemeSeq& a, const PhonemeSeq& b) {
  return edit_distance<std::string>(a.tokens, b.tokens);
}

std::size_t first_diff_index(const PhonemeSeq& a, const PhonemeSeq& b) {
  return first_diff<std::string>(a.tokens, b.tokens);
}

std::size_t first_diff_index(const TokenSeq& a, const TokenSeq& b) {
  const std::size_t n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && to_lower(a[i]) == to_lower(b[i])) ++i;
  return i;
}

bool is_partial_overlap(const TokenSeq& x, const TokenSeq& y) {
  return x.size() > y.size() && first_diff_index(x, y) == y.size();
}

namespace {

std::vector<Neighbor> scan_neighbors(std::string_view word,
                                     const PhonemeSeq& pron,
                                     const Lexicon& lexicon,
                                     std::size_t max_distance) {
  std::vector<Neighbor> out;
  for (const auto& [other, variants] : lexicon.entries()) {
    if (other == word) continue;
    const auto& cand = variants.front();
    const std::size_t gap = cand.size() > pron.size() ? cand.size() - pron.size()
                                                      : pron.size() - cand.size();
    if (gap > max_distance) continue;
    const std::size_t d = levenshtein(pron, cand);
    if (d <= max_distance) out.push_back({other, d});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<Neighbor> phonetic_neighbors(std::string_view word,
                                         const Lexicon& lexicon,
                                         std::size_t max_distance,
                                         std::size_t limit) {
  const auto key = to_lower(word);
  auto out = scan_neighbors(key, lexicon.primary(key), lexicon, max_distance);
  if (out.size() > limit) out.resize(limit);
  return out;
}

NeighborIndex::NeighborIndex(const Lexicon& lexicon,
                             std::span<const std::string> words,
                             std::size_t max_distance)
    : max_distance_(max_distance) {
  for (const auto& raw : words) {
    auto key = to_lower(raw);
    if (table_.contains(key)) continue;
    auto found = scan_neighbors(key, lexicon.primary(key), lexicon, max_distance);
    table_.emplace(std::move(key), std::move(found));
  }
}

const std::vector<Neighbor>& NeighborIndex::neighbors(std::string_view word) const {
  const auto it = table_.find(word);
  if (it == table_.end()) throw OovError(std::string(word));
  return it->second;
}

}  // namespace pob
