#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pob/diagnostics.hpp"
#include "pob/generator.hpp"
#include "pob/matrix.hpp"
#include "pob/util.hpp"

namespace pob {

/// Token id 0 is padding; phoneme symbols map to 1..V-1.
inline constexpr int kPadId = 0;

struct MatcherConfig {
  std::size_t vocab_size = 2;      // V, including the pad id
  std::size_t embed_dim = 16;      // D
  std::size_t max_positions = 25;  // m
  double noise_sigma = 0.1;
  std::size_t frame_dup = 2;       // audio frames per query phoneme
  ScorerKind scorer_kind = ScorerKind::Eps;

  /// Throws VocabularyError / LengthError on V < 2, D < 1, m < 1, r < 1 or
  /// negative noise.
  void validate() const;
  bool operator==(const MatcherConfig&) const = default;
};

class PhonemeVocabulary {
 public:
  PhonemeVocabulary() = default;
  /// Symbols are sorted and deduplicated; id(symbols[i]) == i + 1.
  explicit PhonemeVocabulary(std::vector<std::string> symbols);

  int id(std::string_view symbol) const;  // throws VocabularyError
  std::vector<int> encode(const PhonemeSeq& seq) const;
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  std::size_t vocab_size() const noexcept { return symbols_.size() + 1; }

  bool operator==(const PhonemeVocabulary&) const = default;

 private:
  std::vector<std::string> symbols_;
};

/// All trainable tensors. Also used as the gradient container.
struct MatcherParams {
  Matrix text_embedding;    // V x D
  Matrix audio_projection;  // D x V
  Matrix scorer;            // m x D (baseline) or 1 x D (eps, shared w)
  double bias = 0.0;

  std::size_t scorer_parameter_count() const noexcept { return scorer.size() + 1; }
  std::size_t parameter_count() const noexcept {
    return text_embedding.size() + audio_projection.size() + scorer_parameter_count();
  }
  /// Same shapes, all zeros.
  MatcherParams zeros_like() const;

  bool operator==(const MatcherParams&) const = default;
};

/// Uniform in [-scale, scale].
MatcherParams init_params(const MatcherConfig& config, Rng& rng, double scale = 0.1);

struct Example {
  std::vector<int> anchor;
  std::vector<int> query;
  bool label = false;
};

Example make_example(const PairRecord& record, const PhonemeVocabulary& vocabulary);

/// m x D; row i is the embedding of anchor id i for i < |anchor|, zero after.
Matrix encode_text(std::span<const int> anchor, const MatcherParams& params,
                   const MatcherConfig& config);

/// Frozen Gaussian perturbations for one query: (r * |query|) x V entries with
/// standard deviation noise_sigma, or an empty matrix when sigma is zero.
Matrix sample_audio_noise(std::size_t query_length, const MatcherConfig& config, Rng& rng);

/// (r * |query|) x D; frame f = audio_projection * (one_hot(id) + noise row f).
/// An empty noise matrix means noise-free frames.
Matrix encode_audio(std::span<const int> query, const MatcherParams& params,
                    const MatcherConfig& config, const Matrix& noise);
Matrix encode_audio_surrogate(std::span<const int> query, const MatcherParams& params,
                              const MatcherConfig& config, Rng& rng);

struct Alignment {
  AlignedFeatureSample features;  // X, m x D
  Matrix attention;               // valid_length x frames
  Matrix context;                 // valid_length x D
};

/// Scaled dot-product cross-attention from anchor positions to audio frames;
/// X_i = text_i (elementwise) context_i for real positions, zero rows after.
Alignment align(const Matrix& text, std::size_t valid_length, const Matrix& audio,
                const MatcherConfig& config);

/// Baseline: z = sum_i a_i . X_i + b over all m rows. EPS: z = mean over the
/// valid_length real rows of w . X_i, plus b.
double score(const AlignedFeatureSample& features, const MatcherParams& params,
             const MatcherConfig& config);

double logistic(double z);

struct ForwardTrace {
  AlignedFeatureSample aligned_features;
  double logit = 0.0;
  double probability = 0.5;
};

ForwardTrace forward(const Example& example, const MatcherParams& params,
                     const MatcherConfig& config, const Matrix& noise);

/// Mean binary cross-entropy over the batch with frozen per-example noise
/// (noises empty, or one matrix per example).
double batch_loss(std::span<const Example> batch, const MatcherParams& params,
                  const MatcherConfig& config, std::span<const Matrix> noises);

struct LossAndGrad {
  double loss = 0.0;
  MatcherParams grad;
};

/// Analytic gradients of batch_loss. Throws NumericError on a non-finite loss.
LossAndGrad loss_and_grad(std::span<const Example> batch, const MatcherParams& params,
                          const MatcherConfig& config, std::span<const Matrix> noises);
/// Samples fresh noise per example from rng.
LossAndGrad loss_and_grad(std::span<const Example> batch, const MatcherParams& params,
                          const MatcherConfig& config, Rng& rng);

/// Baseline rows verbatim; EPS as m identical rows equal to w.
ScoringWeights export_scoring_weights(const MatcherParams& params, const MatcherConfig& config);

struct Model {
  MatcherConfig config;
  PhonemeVocabulary vocabulary;
  MatcherParams params;

  bool operator==(const Model&) const = default;
};

std::string model_to_string(const Model& model);
Model model_from_string(std::string_view text);
void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

/// Probability of a match for one record; noise drawn from rng.
double predict(const Model& model, const PairRecord& record, Rng& rng);

/// Noise-free forward passes over `count` records drawn without replacement
/// under `seed` (all records, in order, when count >= size). Records whose
/// anchor exceeds m are skipped. *truncated is set when count > size.
std::vector<AlignedFeatureSample> export_aligned_features(const Model& model,
                                                          std::span<const PairRecord> records,
                                                          std::size_t count, std::uint64_t seed,
                                                          bool* truncated = nullptr);

}  // namespace pob
