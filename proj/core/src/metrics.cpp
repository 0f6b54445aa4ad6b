#include "pob/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "json.hpp"
#include "pob/error.hpp"
#include "pob/util.hpp"

namespace pob {
namespace {

struct ClassCounts {
  std::size_t pos = 0;
  std::size_t neg = 0;
};

ClassCounts count_classes(std::span<const ScoreEntry> scores) {
  ClassCounts c;
  for (const auto& s : scores) {
    if (!std::isfinite(s.score)) throw MetricError("non-finite score for id '" + s.id + "'");
    (s.label ? c.pos : c.neg)++;
  }
  return c;
}

ClassCounts require_both_classes(std::span<const ScoreEntry> scores) {
  const auto c = count_classes(scores);
  if (c.pos == 0 || c.neg == 0)
    throw MetricError("need at least one positive and one negative score");
  return c;
}

}  // namespace

EerPoint eer_point(std::span<const ScoreEntry> scores) {
  const auto counts = require_both_classes(scores);
  std::vector<std::pair<double, bool>> sorted;
  sorted.reserve(scores.size());
  for (const auto& s : scores) sorted.emplace_back(s.score, s.label);
  std::sort(sorted.begin(), sorted.end());

  const double inf = std::numeric_limits<double>::infinity();
  const auto P = static_cast<double>(counts.pos);
  const auto N = static_cast<double>(counts.neg);

  // Sweep point j: threshold t_j, FNR = pos below t_j, FPR = neg at or above.
  double prev_t = -inf, prev_fnr = 0.0, prev_fpr = 1.0;
  std::size_t pos_below = 0, neg_below = 0, i = 0;
  while (true) {
    double t, fnr, fpr;
    if (i < sorted.size()) {
      t = sorted[i].first;
      fnr = static_cast<double>(pos_below) / P;
      fpr = (N - static_cast<double>(neg_below)) / N;
      while (i < sorted.size() && sorted[i].first == t) {
        (sorted[i].second ? pos_below : neg_below)++;
        ++i;
      }
    } else {
      t = inf;
      fnr = 1.0;
      fpr = 0.0;
    }
    if (fnr >= fpr) {
      const double d_prev = prev_fpr - prev_fnr;  // > 0
      const double d_cur = fnr - fpr;             // >= 0
      const double alpha = d_prev / (d_prev + d_cur);
      EerPoint out;
      out.eer = prev_fnr + alpha * (fnr - prev_fnr);
      if (std::isfinite(prev_t) && std::isfinite(t))
        out.threshold = prev_t + alpha * (t - prev_t);
      else
        out.threshold = std::isfinite(t) ? t : prev_t;
      return out;
    }
    prev_t = t;
    prev_fnr = fnr;
    prev_fpr = fpr;
  }
}

double eer(std::span<const ScoreEntry> scores) { return eer_point(scores).eer; }

double auc(std::span<const ScoreEntry> scores) {
  const auto counts = require_both_classes(scores);
  std::vector<std::pair<double, bool>> sorted;
  sorted.reserve(scores.size());
  for (const auto& s : scores) sorted.emplace_back(s.score, s.label);
  std::sort(sorted.begin(), sorted.end());

  // Wins counted in halves to keep the tie bookkeeping integral.
  std::size_t neg_below = 0;
  unsigned long long half_wins = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i, pos_tied = 0, neg_tied = 0;
    for (; j < sorted.size() && sorted[j].first == sorted[i].first; ++j)
      (sorted[j].second ? pos_tied : neg_tied)++;
    half_wins += 2ULL * pos_tied * neg_below + 1ULL * pos_tied * neg_tied;
    neg_below += neg_tied;
    i = j;
  }
  return static_cast<double>(half_wins) /
         (2.0 * static_cast<double>(counts.pos) * static_cast<double>(counts.neg));
}

double accuracy(std::span<const ScoreEntry> scores, double threshold) {
  if (scores.empty()) throw MetricError("accuracy of an empty score set");
  std::size_t correct = 0;
  for (const auto& s : scores)
    if ((s.score >= threshold) == s.label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

Histogram first_diff_histogram(std::span<const PairRecord> records, const BinSpec& bins) {
  bins.validate();
  if (records.empty()) throw MetricError("histogram of an empty manifest");
  Histogram h{bins, std::vector<std::size_t>(bins.size(), 0), {}, 0, records.size()};
  for (const auto& r : records) {
    if (const auto b = bins.bin_of(r.first_diff_index))
      ++h.counts[*b];
    else
      ++h.overflow;
  }
  const std::size_t binned = h.total - h.overflow;
  if (binned == 0) throw MetricError("no record falls inside the bins");
  h.ratios.reserve(h.counts.size());
  for (const auto c : h.counts)
    h.ratios.push_back(static_cast<double>(c) / static_cast<double>(binned));
  return h;
}

std::string histogram_csv(const Histogram& h) {
  std::string out = "bin_lo,bin_hi,ratio\n";
  for (std::size_t b = 0; b < h.bins.size(); ++b) {
    out += std::to_string(h.bins.ranges[b].lo) + "," + std::to_string(h.bins.ranges[b].hi) +
           "," + format_double(h.ratios[b]) + "\n";
  }
  return out;
}

std::string scores_to_csv(std::span<const ScoreEntry> scores) {
  std::string out = "id,score,label\n";
  for (const auto& s : scores)
    out += csv_escape(s.id) + "," + format_double(s.score) + "," + (s.label ? "1" : "0") + "\n";
  return out;
}

std::vector<ScoreEntry> scores_from_csv(std::string_view text) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw FormatError("score file is empty");
  const auto& header = rows.front();
  if (header.size() != 3 || header[0] != "id" || header[1] != "score" || header[2] != "label")
    throw FormatError("score file header must be id,score,label", 1);

  std::vector<ScoreEntry> out;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t line = r + 1;
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 3) throw FormatError("expected 3 fields", line);
    ScoreEntry e;
    e.id = row[0];
    const auto& sc = row[1];
    const auto [ptr, ec] = std::from_chars(sc.data(), sc.data() + sc.size(), e.score);
    if (ec != std::errc() || ptr != sc.data() + sc.size() || !std::isfinite(e.score))
      throw FormatError("bad score '" + sc + "'", line);
    if (row[2] == "1")
      e.label = true;
    else if (row[2] != "0")
      throw FormatError("label must be 0 or 1", line);
    if (!seen.insert(e.id).second) throw FormatError("duplicate id '" + e.id + "'", line);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ScoreEntry> read_scores(const std::filesystem::path& path) {
  return scores_from_csv(read_text_file(path));
}

MetricsSummary summarize(std::span<const ScoreEntry> scores, double threshold) {
  MetricsSummary m;
  const auto c = count_classes(scores);
  m.n_pos = c.pos;
  m.n_neg = c.neg;
  m.eer = eer(scores);
  m.auc = auc(scores);
  m.acc = accuracy(scores, threshold);
  m.threshold = threshold;
  return m;
}

std::string metrics_to_string(const MetricsSummary& m) {
  nlohmann::ordered_json j;
  j["eer"] = m.eer;
  j["auc"] = m.auc;
  j["acc"] = m.acc;
  j["threshold"] = m.threshold;
  j["n_pos"] = m.n_pos;
  j["n_neg"] = m.n_neg;
  return j.dump(2) + "\n";
}

}  // namespace pob
