#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pob/matrix.hpp"

namespace pob {

enum class ScorerKind { Baseline, Eps };
std::string_view to_string(ScorerKind kind);
/// "baseline" or "eps"; throws FormatError otherwise.
ScorerKind scorer_kind_from_string(std::string_view name);

/// Final scoring-layer weights as m per-position rows a_1..a_m of width n.
/// EPS weights carry the shared vector w replicated in every row.
struct ScoringWeights {
  Matrix rows;
  double bias = 0.0;
  ScorerKind kind = ScorerKind::Baseline;

  std::size_t positions() const noexcept { return rows.rows(); }
  std::size_t width() const noexcept { return rows.cols(); }

  /// Throws DiagnosticError if m or n is zero or EPS rows differ.
  void validate() const;

  static ScoringWeights eps(std::span<const double> w, double bias, std::size_t m);
};

/// Aligned features X (m rows of width n); rows at or beyond valid_length
/// are zero padding.
struct AlignedFeatureSample {
  Matrix features;
  std::size_t valid_length = 0;
};

std::vector<double> weight_norms(const ScoringWeights& weights);

/// Share of total row-norm mass held by the first k positions. Requires
/// 1 <= k <= m and a nonzero total; throws DiagnosticError otherwise.
double prefix_concentration(const ScoringWeights& weights, std::size_t k);

/// Position-wise contributions: per-position sample mean of |a_i . X_i|,
/// normalized to sum to one.
std::vector<double> contributions(const ScoringWeights& weights,
                                  std::span<const AlignedFeatureSample> samples);

struct CurvePoint {
  std::size_t k = 0;
  double fraction = 0.0;  // k / m
  double rho = 0.0;
};

struct ConcentrationCurve {
  std::vector<CurvePoint> points;
  /// sum_k (rho(k) - k/m) / m; positive means prefix-heavy.
  double excess_area = 0.0;
};

ConcentrationCurve concentration_curve(const ScoringWeights& weights);

/// Reads scoring weights from either a model file (top-level "scorer" plus
/// "config.max_positions") or a standalone weights document
/// {format_version, kind, rows | (w, m), bias}.
ScoringWeights load_scoring_weights(const std::filesystem::path& path);
ScoringWeights scoring_weights_from_string(std::string_view text);
/// Standalone weights document; EPS is stored as {w, m}.
std::string scoring_weights_to_string(const ScoringWeights& weights);

/// CSV with columns i,norm,C_i,k_over_m,rho (one row per position; the
/// prefix length k equals i).
std::string diagnostics_csv(std::span<const double> norms, std::span<const double> contrib,
                            const ConcentrationCurve& curve);

}  // namespace pob
