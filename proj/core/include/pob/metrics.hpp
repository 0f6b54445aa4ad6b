#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pob/generator.hpp"

namespace pob {

struct ScoreEntry {
  std::string id;
  double score = 0.0;
  bool label = false;

  bool operator==(const ScoreEntry&) const = default;
};

struct EerPoint {
  double eer = 0.0;
  /// Threshold at the FPR/FNR crossing (accept when score >= threshold),
  /// interpolated like the rate.
  double threshold = 0.0;
};

/// Sweep over -inf, every unique score, +inf; linear interpolation between
/// the two sweep points where FNR - FPR changes sign. Throws MetricError
/// unless both classes are present or on non-finite scores.
EerPoint eer_point(std::span<const ScoreEntry> scores);
double eer(std::span<const ScoreEntry> scores);

/// Mann-Whitney: P(pos > neg) with ties counted one half.
double auc(std::span<const ScoreEntry> scores);

/// Fraction with (score >= threshold) == label. Throws MetricError on empty
/// input.
double accuracy(std::span<const ScoreEntry> scores, double threshold = 0.5);

struct Histogram {
  BinSpec bins;
  std::vector<std::size_t> counts;
  std::vector<double> ratios;  // over binned records only
  std::size_t overflow = 0;    // records outside every bin
  std::size_t total = 0;
};

/// Throws MetricError on empty input or when every record overflows.
Histogram first_diff_histogram(std::span<const PairRecord> records, const BinSpec& bins);
std::string histogram_csv(const Histogram& histogram);

/// "id,score,label" with unique ids.
std::string scores_to_csv(std::span<const ScoreEntry> scores);
std::vector<ScoreEntry> scores_from_csv(std::string_view text);
std::vector<ScoreEntry> read_scores(const std::filesystem::path& path);

struct MetricsSummary {
  double eer = 0.0;
  double auc = 0.0;
  double acc = 0.0;
  double threshold = 0.5;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

MetricsSummary summarize(std::span<const ScoreEntry> scores, double threshold);
std::string metrics_to_string(const MetricsSummary& summary);

}  // namespace pob
