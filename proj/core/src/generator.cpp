#include "pob/generator.hpp"

#include <charconv>
#include <exception>
#include <set>
#include <thread>
#include <utility>

#include "pob/error.hpp"

namespace pob {

BinSpec BinSpec::defaults() {
  return BinSpec{{{0, 4}, {5, 9}, {10, 14}, {15, 19}, {20, 24}}};
}

BinSpec BinSpec::parse(std::string_view text) {
  BinSpec spec;
  auto number = [&](std::string_view s) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      throw FormatError("bad bin bound '" + std::string(s) + "' in '" +
                        std::string(text) + "'");
    return v;
  };
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const auto item = text.substr(start, end - start);
    const auto dash = item.find('-');
    if (dash == std::string_view::npos)
      throw FormatError("bin '" + std::string(item) + "' is not of the form lo-hi");
    spec.ranges.push_back({number(item.substr(0, dash)), number(item.substr(dash + 1))});
    start = end + 1;
  }
  spec.validate();
  return spec;
}

std::string BinSpec::str() const {
  std::string out;
  for (const auto& r : ranges) {
    if (!out.empty()) out += ',';
    out += std::to_string(r.lo) + "-" + std::to_string(r.hi);
  }
  return out;
}

void BinSpec::validate() const {
  if (ranges.empty()) throw FormatError("bin spec has no ranges");
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (ranges[i].lo > ranges[i].hi)
      throw FormatError("bin " + std::to_string(i) + " is empty");
    if (i > 0 && ranges[i].lo <= ranges[i - 1].hi)
      throw FormatError("bins must be sorted and disjoint");
  }
}

std::optional<std::size_t> BinSpec::bin_of(std::size_t first_diff_index) const {
  for (std::size_t i = 0; i < ranges.size(); ++i)
    if (first_diff_index >= ranges[i].lo && first_diff_index <= ranges[i].hi) return i;
  return std::nullopt;
}

std::string_view to_string(Source source) {
  switch (source) {
    case Source::PobSpark: return "pob-spark";
    case Source::PobLp: return "pob-lp";
    case Source::BiasStudy: return "bias-study";
  }
  return "unknown";
}

Source source_from_string(std::string_view name) {
  if (name == "pob-spark") return Source::PobSpark;
  if (name == "pob-lp") return Source::PobLp;
  if (name == "bias-study") return Source::BiasStudy;
  throw FormatError("unknown source '" + std::string(name) + "'");
}

PairRecord make_record(const TokenSeq& anchor, const TokenSeq& query, bool label,
                       Source source, const Lexicon& lexicon, std::string_view role,
                       std::string_view salt, bool fallback) {
  PairRecord r;
  r.anchor_text = anchor.text();
  r.query_text = query.text();
  std::string key = r.anchor_text;
  key += '\x1f';
  key += r.query_text;
  key += '\x1f';
  key += salt;
  r.id = hex64(fnv1a64(key)) + "-" + std::string(role);
  r.anchor_phonemes = phonemize(anchor, lexicon, fallback);
  r.query_phonemes = phonemize(query, lexicon, fallback);
  r.first_diff_index = first_diff_index(r.anchor_phonemes, r.query_phonemes);
  r.label = label;
  r.source = source;
  return r;
}

TokenSeq build_phrase(const Lexicon& lexicon, std::span<const std::string> word_pool,
                      std::size_t l_max, Rng& rng) {
  if (word_pool.empty()) throw GenerationError("word pool is empty");
  TokenSeq phrase;
  std::size_t total = 0;
  for (;;) {
    const auto& word = word_pool[uniform_index(rng, word_pool.size())];
    const std::size_t len = lexicon.primary(word).size();
    if (total + len < l_max) {
      phrase.words.push_back(word);
      total += len;
      continue;
    }
    if (!phrase.empty()) break;
    // First draw did not fit: make sure some word can, then redraw.
    bool any = false;
    for (const auto& w : word_pool) {
      if (lexicon.primary(w).size() < l_max) {
        any = true;
        break;
      }
    }
    if (!any)
      throw GenerationError("no pool word fits under l_max=" + std::to_string(l_max));
  }
  return phrase;
}

namespace {

template <class Lookup>
PhrasePair substitute(const TokenSeq& phrase, const Lexicon& lexicon, Lookup&& lookup,
                      Rng& rng) {
  if (phrase.empty()) throw GenerationError("cannot pair an empty phrase");
  std::vector<std::size_t> order(phrase.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle(order, rng);

  for (const std::size_t j : order) {
    const std::vector<Neighbor>& all = lookup(phrase[j]);
    std::vector<const Neighbor*> usable;
    for (const auto& n : all)
      if (n.distance > 0) usable.push_back(&n);
    if (usable.empty()) continue;
    const Neighbor& pick = *usable[uniform_index(rng, usable.size())];

    PhrasePair pair{phrase, phrase, j, 0};
    pair.b.words[j] = pick.word;
    pair.first_diff_index =
        first_diff_index(phonemize(pair.a, lexicon), phonemize(pair.b, lexicon));
    return pair;
  }
  throw GenerationError("no word of '" + phrase.text() + "' has a phonetic neighbor");
}

}  // namespace

PhrasePair make_pair(const TokenSeq& phrase, const Lexicon& lexicon,
                     std::size_t max_distance, Rng& rng) {
  std::vector<Neighbor> scratch;
  return substitute(
      phrase, lexicon,
      [&](const std::string& w) -> const std::vector<Neighbor>& {
        scratch = phonetic_neighbors(w, lexicon, max_distance);
        return scratch;
      },
      rng);
}

PhrasePair make_pair(const TokenSeq& phrase, const Lexicon& lexicon,
                     const NeighborIndex& index, Rng& rng) {
  return substitute(
      phrase, lexicon,
      [&](const std::string& w) -> const std::vector<Neighbor>& {
        return index.neighbors(w);
      },
      rng);
}

std::vector<PhrasePair> sample_uniform_first_diff(std::span<const PhrasePair> pairs,
                                                  const BinSpec& bins,
                                                  std::size_t per_bin, Rng& rng,
                                                  SamplingReport* report) {
  const std::vector<std::size_t> quotas(bins.size(), per_bin);
  return sample_uniform_first_diff(pairs, bins, quotas, rng, report);
}

std::vector<PhrasePair> sample_uniform_first_diff(std::span<const PhrasePair> pairs,
                                                  const BinSpec& bins,
                                                  std::span<const std::size_t> quotas,
                                                  Rng& rng, SamplingReport* report) {
  bins.validate();
  if (quotas.size() != bins.size())
    throw GenerationError("one quota per bin is required");

  SamplingReport local;
  local.available.assign(bins.size(), 0);
  local.selected.assign(bins.size(), 0);
  std::vector<std::vector<std::size_t>> members(bins.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (const auto b = bins.bin_of(pairs[i].first_diff_index)) {
      members[*b].push_back(i);
    } else {
      ++local.unbinned;
    }
  }

  std::vector<PhrasePair> out;
  for (std::size_t b = 0; b < bins.size(); ++b) {
    auto& idx = members[b];
    local.available[b] = idx.size();
    if (idx.empty()) {
      local.skipped_bins.push_back(b);
      local.warnings.push_back("bin " + std::to_string(bins.ranges[b].lo) + "-" +
                               std::to_string(bins.ranges[b].hi) +
                               " has no candidates; skipped");
      continue;
    }
    const std::size_t take = std::min(quotas[b], idx.size());
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t j = i + uniform_index(rng, idx.size() - i);
      std::swap(idx[i], idx[j]);
      out.push_back(pairs[idx[i]]);
    }
    local.selected[b] = take;
  }
  shuffle(out, rng);
  if (report) *report = std::move(local);
  return out;
}

std::array<PairRecord, 3> expand_tuples(const PhrasePair& pair, const Lexicon& lexicon) {
  std::string key = pair.a.text();
  key += '\x1f';
  key += pair.b.text();
  const std::string base = hex64(fnv1a64(key));
  auto make = [&](const TokenSeq& anchor, const TokenSeq& query, bool label,
                  std::string_view role) {
    auto r = make_record(anchor, query, label, Source::PobSpark, lexicon, role);
    r.id = base + "-" + std::string(role);
    return r;
  };
  return {make(pair.a, pair.b, false, "ab"), make(pair.b, pair.a, false, "ba"),
          make(pair.a, pair.a, true, "aa")};
}

std::vector<PairRecord> generate_pob_lp(std::span<const LpRow> rows,
                                        std::span<const std::string> common_words,
                                        const Lexicon& lexicon, Rng& rng,
                                        const LpOptions& options, LpReport* report) {
  if (common_words.empty()) throw GenerationError("common word list is empty");
  LpReport local;
  std::set<std::string> seen;
  std::vector<PairRecord> out;

  for (const auto& row : rows) {
    if (!row.label) {
      ++local.ignored_negatives;
      continue;
    }
    if (row.anchor.empty() || row.anchor.words != row.query.words) {
      ++local.mismatched_positives;
      continue;
    }
    std::string key = row.anchor.text();
    key += '\x1f';
    key += row.audio_path.value_or("");
    if (!seen.insert(key).second) {
      ++local.duplicates;
      continue;
    }

    std::optional<std::string> appended;
    for (std::size_t attempt = 0; attempt <= options.max_retries; ++attempt) {
      const auto& w = common_words[uniform_index(rng, common_words.size())];
      if (lexicon.contains(w) ||
          (options.fallback && !fallback_pronunciation(w).empty())) {
        appended = w;
        break;
      }
      ++local.retries;
    }
    if (!appended)
      throw GenerationError("no phonemizable common word after " +
                            std::to_string(options.max_retries + 1) + " draws");

    auto pos = make_record(row.anchor, row.query, true, Source::PobLp, lexicon, "lp-pos",
                           key, options.fallback);
    TokenSeq extended = row.anchor;
    extended.words.push_back(*appended);
    auto neg = make_record(extended, row.query, false, Source::PobLp, lexicon, "lp-neg",
                           key, options.fallback);
    pos.audio_path = row.audio_path;
    neg.audio_path = row.audio_path;
    ++local.positives;
    out.push_back(std::move(pos));
    out.push_back(std::move(neg));
  }
  if (report) *report = local;
  return out;
}

SparkResult generate_spark(const Lexicon& lexicon, std::span<const std::string> word_pool,
                           const SparkConfig& config) {
  config.bins.validate();
  if (config.shards == 0) throw GenerationError("shards must be positive");

  std::vector<std::size_t> quotas(config.bins.size());
  for (std::size_t b = 0; b < quotas.size(); ++b) {
    quotas[b] = config.per_bin ? *config.per_bin
                               : config.n_pairs / quotas.size() +
                                     (b < config.n_pairs % quotas.size() ? 1 : 0);
  }

  std::vector<std::string> pool;
  pool.reserve(word_pool.size());
  for (const auto& w : word_pool) {
    auto key = to_lower(w);
    if (!lexicon.contains(key)) throw OovError(key);
    pool.push_back(std::move(key));
  }
  const NeighborIndex index(lexicon, pool, config.max_distance);

  const std::size_t attempts = config.n_pairs * config.candidate_factor;
  struct Shard {
    std::vector<PhrasePair> pairs;
    std::size_t retries = 0;
    std::exception_ptr error;
  };
  std::vector<Shard> shards(config.shards);
  auto run_shard = [&](std::size_t s) {
    try {
      auto rng = make_rng(config.seed, s + 1);
      const std::size_t n =
          attempts / config.shards + (s < attempts % config.shards ? 1 : 0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto phrase = build_phrase(lexicon, pool, config.l_max, rng);
        try {
          shards[s].pairs.push_back(make_pair(phrase, lexicon, index, rng));
        } catch (const GenerationError&) {
          ++shards[s].retries;
        }
      }
    } catch (...) {
      shards[s].error = std::current_exception();
    }
  };
  if (config.shards == 1) {
    run_shard(0);
  } else {
    std::vector<std::jthread> workers;
    for (std::size_t s = 0; s < config.shards; ++s) workers.emplace_back(run_shard, s);
  }

  SparkResult result;
  std::vector<PhrasePair> candidates;
  std::set<std::pair<std::string, std::string>> seen;
  for (auto& shard : shards) {
    if (shard.error) std::rethrow_exception(shard.error);
    result.report.retries += shard.retries;
    for (auto& p : shard.pairs) {
      auto a = p.a.text();
      auto b = p.b.text();
      if (b < a) std::swap(a, b);
      if (!seen.emplace(std::move(a), std::move(b)).second) {
        ++result.report.duplicates;
        continue;
      }
      candidates.push_back(std::move(p));
    }
  }
  result.report.candidates = candidates.size();

  auto rng = make_rng(config.seed, 0);
  const auto sampled = sample_uniform_first_diff(candidates, config.bins, quotas, rng,
                                                 &result.report.sampling);
  result.records.reserve(sampled.size() * 3);
  for (const auto& pair : sampled) {
    for (auto& r : expand_tuples(pair, lexicon)) result.records.push_back(std::move(r));
  }
  return result;
}

}  // namespace pob
