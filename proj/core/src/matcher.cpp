#include "pob/matcher.hpp"

#include <algorithm>
#include <cmath>

#include "json_io.hpp"
#include "pob/error.hpp"

namespace pob {

void MatcherConfig::validate() const {
  if (vocab_size < 2) throw VocabularyError("vocab_size must be at least 2");
  if (embed_dim < 1) throw LengthError("embed_dim must be at least 1");
  if (max_positions < 1) throw LengthError("max_positions must be at least 1");
  if (frame_dup < 1) throw LengthError("frame_dup must be at least 1");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw NumericError("noise_sigma must be finite and nonnegative");
}

PhonemeVocabulary::PhonemeVocabulary(std::vector<std::string> symbols)
    : symbols_(std::move(symbols)) {
  std::sort(symbols_.begin(), symbols_.end());
  symbols_.erase(std::unique(symbols_.begin(), symbols_.end()), symbols_.end());
}

int PhonemeVocabulary::id(std::string_view symbol) const {
  const auto it = std::lower_bound(symbols_.begin(), symbols_.end(), symbol);
  if (it == symbols_.end() || *it != symbol)
    throw VocabularyError("phoneme '" + std::string(symbol) + "' is not in the model vocabulary");
  return static_cast<int>(it - symbols_.begin()) + 1;
}

std::vector<int> PhonemeVocabulary::encode(const PhonemeSeq& seq) const {
  std::vector<int> out;
  out.reserve(seq.size());
  for (const auto& s : seq) out.push_back(id(s));
  return out;
}

MatcherParams MatcherParams::zeros_like() const {
  return {Matrix(text_embedding.rows(), text_embedding.cols()),
          Matrix(audio_projection.rows(), audio_projection.cols()),
          Matrix(scorer.rows(), scorer.cols()), 0.0};
}

MatcherParams init_params(const MatcherConfig& config, Rng& rng, double scale) {
  config.validate();
  const std::size_t V = config.vocab_size, D = config.embed_dim;
  MatcherParams p{Matrix(V, D), Matrix(D, V),
                  Matrix(config.scorer_kind == ScorerKind::Eps ? 1 : config.max_positions, D),
                  0.0};
  for (auto* m : {&p.text_embedding, &p.audio_projection, &p.scorer})
    for (auto& v : m->values()) v = uniform_real(rng, -scale, scale);
  p.bias = uniform_real(rng, -scale, scale);
  return p;
}

Example make_example(const PairRecord& record, const PhonemeVocabulary& vocabulary) {
  return {vocabulary.encode(record.anchor_phonemes), vocabulary.encode(record.query_phonemes),
          record.label};
}

namespace {

void check_id(int id, const MatcherConfig& config) {
  if (id <= kPadId || static_cast<std::size_t>(id) >= config.vocab_size)
    throw VocabularyError("token id " + std::to_string(id) + " outside [1, " +
                          std::to_string(config.vocab_size) + ")");
}

}  // namespace

Matrix encode_text(std::span<const int> anchor, const MatcherParams& params,
                   const MatcherConfig& config) {
  if (anchor.size() > config.max_positions)
    throw LengthError("anchor has " + std::to_string(anchor.size()) +
                      " phonemes, more than max_positions=" +
                      std::to_string(config.max_positions));
  Matrix out(config.max_positions, config.embed_dim);
  for (std::size_t i = 0; i < anchor.size(); ++i) {
    check_id(anchor[i], config);
    const auto src = params.text_embedding.row(static_cast<std::size_t>(anchor[i]));
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix sample_audio_noise(std::size_t query_length, const MatcherConfig& config, Rng& rng) {
  if (config.noise_sigma == 0.0) return {};
  Matrix noise(query_length * config.frame_dup, config.vocab_size);
  for (auto& v : noise.values()) v = config.noise_sigma * standard_normal(rng);
  return noise;
}

Matrix encode_audio(std::span<const int> query, const MatcherParams& params,
                    const MatcherConfig& config, const Matrix& noise) {
  const std::size_t F = query.size() * config.frame_dup;
  const std::size_t D = config.embed_dim, V = config.vocab_size;
  if (!noise.empty() && (noise.rows() != F || noise.cols() != V))
    throw NumericError("audio noise shape does not match the query");
  Matrix out(F, D);
  for (std::size_t f = 0; f < F; ++f) {
    const int id = query[f / config.frame_dup];
    check_id(id, config);
    for (std::size_t d = 0; d < D; ++d) {
      double v = params.audio_projection(d, static_cast<std::size_t>(id));
      if (!noise.empty()) v += dot(params.audio_projection.row(d), noise.row(f));
      out(f, d) = v;
    }
  }
  return out;
}

Matrix encode_audio_surrogate(std::span<const int> query, const MatcherParams& params,
                              const MatcherConfig& config, Rng& rng) {
  const auto noise = sample_audio_noise(query.size(), config, rng);
  return encode_audio(query, params, config, noise);
}

Alignment align(const Matrix& text, std::size_t valid_length, const Matrix& audio,
                const MatcherConfig& config) {
  if (audio.rows() == 0) throw AlignmentError("cannot align against zero audio frames");
  const std::size_t m = text.rows(), D = text.cols(), F = audio.rows();
  if (audio.cols() != D || valid_length > m)
    throw AlignmentError("text and audio embeddings have inconsistent shapes");
  (void)config;
  const double scale = 1.0 / std::sqrt(static_cast<double>(D));

  Alignment out{{Matrix(m, D), valid_length}, Matrix(valid_length, F), Matrix(valid_length, D)};
  for (std::size_t i = 0; i < valid_length; ++i) {
    auto alpha = out.attention.row(i);
    double peak = -INFINITY;
    for (std::size_t f = 0; f < F; ++f) {
      alpha[f] = dot(text.row(i), audio.row(f)) * scale;
      peak = std::max(peak, alpha[f]);
    }
    double total = 0.0;
    for (auto& a : alpha) {
      a = std::exp(a - peak);
      total += a;
    }
    for (auto& a : alpha) a /= total;

    auto ctx = out.context.row(i);
    for (std::size_t f = 0; f < F; ++f)
      for (std::size_t d = 0; d < D; ++d) ctx[d] += alpha[f] * audio(f, d);
    for (std::size_t d = 0; d < D; ++d) out.features.features(i, d) = text(i, d) * ctx[d];
  }
  return out;
}

double score(const AlignedFeatureSample& features, const MatcherParams& params,
             const MatcherConfig& config) {
  const auto& X = features.features;
  if (config.scorer_kind == ScorerKind::Baseline) {
    double z = params.bias;
    for (std::size_t i = 0; i < X.rows(); ++i) z += dot(params.scorer.row(i), X.row(i));
    return z;
  }
  if (features.valid_length == 0) return params.bias;
  double sum = 0.0;
  for (std::size_t i = 0; i < features.valid_length; ++i) sum += dot(params.scorer.row(0), X.row(i));
  return sum / static_cast<double>(features.valid_length) + params.bias;
}

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// softplus(z) - y*z, the BCE of logistic(z) against y.
double bce_with_logit(double z, bool label) {
  const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
  return softplus - (label ? z : 0.0);
}

struct Activations {
  Matrix text;
  Matrix audio;
  Alignment alignment;
  double logit = 0.0;
};

Activations run_forward(const Example& ex, const MatcherParams& params,
                        const MatcherConfig& config, const Matrix& noise) {
  if (ex.query.empty()) throw AlignmentError("query has no phonemes");
  Activations a;
  a.text = encode_text(ex.anchor, params, config);
  a.audio = encode_audio(ex.query, params, config, noise);
  a.alignment = align(a.text, ex.anchor.size(), a.audio, config);
  a.logit = score(a.alignment.features, params, config);
  return a;
}

const Matrix& noise_for(std::span<const Matrix> noises, std::size_t i) {
  static const Matrix kNone;
  return noises.empty() ? kNone : noises[i];
}

}  // namespace

ForwardTrace forward(const Example& example, const MatcherParams& params,
                     const MatcherConfig& config, const Matrix& noise) {
  auto a = run_forward(example, params, config, noise);
  return {std::move(a.alignment.features), a.logit, logistic(a.logit)};
}

double batch_loss(std::span<const Example> batch, const MatcherParams& params,
                  const MatcherConfig& config, std::span<const Matrix> noises) {
  if (batch.empty()) throw NumericError("empty batch");
  double total = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto a = run_forward(batch[b], params, config, noise_for(noises, b));
    total += bce_with_logit(a.logit, batch[b].label);
  }
  return total / static_cast<double>(batch.size());
}

LossAndGrad loss_and_grad(std::span<const Example> batch, const MatcherParams& params,
                          const MatcherConfig& config, std::span<const Matrix> noises) {
  if (batch.empty()) throw NumericError("empty batch");
  if (!noises.empty() && noises.size() != batch.size())
    throw NumericError("one noise matrix per example is required");

  const std::size_t D = config.embed_dim;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(D));
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  LossAndGrad out{0.0, params.zeros_like()};
  auto& g = out.grad;

  std::vector<double> dx(D), de(D), dc(D);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& ex = batch[b];
    const auto& noise = noise_for(noises, b);
    const auto act = run_forward(ex, params, config, noise);
    out.loss += bce_with_logit(act.logit, ex.label);

    const double dz = (logistic(act.logit) - (ex.label ? 1.0 : 0.0)) * inv_batch;
    const std::size_t p = ex.anchor.size();
    const std::size_t F = act.audio.rows();
    const auto& X = act.alignment.features.features;
    const auto& alpha = act.alignment.attention;
    const auto& ctx = act.alignment.context;

    g.bias += dz;
    Matrix du(F, D);
    const double eps_scale = p ? 1.0 / static_cast<double>(p) : 0.0;

    for (std::size_t i = 0; i < p; ++i) {
      // dz/dX_i
      if (config.scorer_kind == ScorerKind::Baseline) {
        for (std::size_t d = 0; d < D; ++d) {
          g.scorer(i, d) += dz * X(i, d);
          dx[d] = dz * params.scorer(i, d);
        }
      } else {
        for (std::size_t d = 0; d < D; ++d) {
          g.scorer(0, d) += dz * eps_scale * X(i, d);
          dx[d] = dz * eps_scale * params.scorer(0, d);
        }
      }
      // X_i = e_i * c_i
      const auto e = act.text.row(i);
      for (std::size_t d = 0; d < D; ++d) {
        de[d] = dx[d] * ctx(i, d);
        dc[d] = dx[d] * e[d];
      }
      // c_i = sum_f alpha_if u_f, alpha_i = softmax(S_i)
      const auto a = alpha.row(i);
      std::vector<double> dalpha(F);
      double weighted = 0.0;
      for (std::size_t f = 0; f < F; ++f) {
        dalpha[f] = dot(dc, act.audio.row(f));
        weighted += a[f] * dalpha[f];
        for (std::size_t d = 0; d < D; ++d) du(f, d) += a[f] * dc[d];
      }
      for (std::size_t f = 0; f < F; ++f) {
        const double ds = a[f] * (dalpha[f] - weighted) * inv_sqrt_d;
        for (std::size_t d = 0; d < D; ++d) {
          de[d] += ds * act.audio(f, d);
          du(f, d) += ds * e[d];
        }
      }
      auto trow = g.text_embedding.row(static_cast<std::size_t>(ex.anchor[i]));
      for (std::size_t d = 0; d < D; ++d) trow[d] += de[d];
    }

    // u_f = P (one_hot(id_f) + noise_f)
    for (std::size_t f = 0; f < F; ++f) {
      const auto id = static_cast<std::size_t>(ex.query[f / config.frame_dup]);
      for (std::size_t d = 0; d < D; ++d) {
        g.audio_projection(d, id) += du(f, d);
        if (!noise.empty()) {
          auto prow = g.audio_projection.row(d);
          const auto nrow = noise.row(f);
          for (std::size_t k = 0; k < prow.size(); ++k) prow[k] += du(f, d) * nrow[k];
        }
      }
    }
  }
  out.loss *= inv_batch;
  if (!std::isfinite(out.loss)) throw NumericError("non-finite loss");
  return out;
}

LossAndGrad loss_and_grad(std::span<const Example> batch, const MatcherParams& params,
                          const MatcherConfig& config, Rng& rng) {
  std::vector<Matrix> noises;
  if (config.noise_sigma > 0.0) {
    noises.reserve(batch.size());
    for (const auto& ex : batch) noises.push_back(sample_audio_noise(ex.query.size(), config, rng));
  }
  return loss_and_grad(batch, params, config, noises);
}

ScoringWeights export_scoring_weights(const MatcherParams& params, const MatcherConfig& config) {
  if (config.scorer_kind == ScorerKind::Eps) {
    return ScoringWeights::eps(params.scorer.row(0), params.bias, config.max_positions);
  }
  return {params.scorer, params.bias, ScorerKind::Baseline};
}

std::string model_to_string(const Model& model) {
  using nlohmann::ordered_json;
  const auto& c = model.config;
  ordered_json j;
  j["format_version"] = 1;
  j["config"] = {{"vocab_size", c.vocab_size},       {"embed_dim", c.embed_dim},
                 {"max_positions", c.max_positions}, {"noise_sigma", c.noise_sigma},
                 {"frame_dup", c.frame_dup},         {"scorer_kind", std::string(to_string(c.scorer_kind))},
                 {"phonemes", model.vocabulary.symbols()}};
  j["text_embedding"] = detail::matrix_to_json(model.params.text_embedding);
  j["audio_projection"] = detail::matrix_to_json(model.params.audio_projection);
  ordered_json scorer;
  scorer["kind"] = std::string(to_string(c.scorer_kind));
  if (c.scorer_kind == ScorerKind::Eps) {
    const auto w = model.params.scorer.row(0);
    scorer["w"] = std::vector<double>(w.begin(), w.end());
  } else {
    scorer["rows"] = detail::matrix_to_json(model.params.scorer);
  }
  scorer["bias"] = model.params.bias;
  j["scorer"] = scorer;
  return j.dump() + "\n";
}

Model model_from_string(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("invalid model JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format_version", 0) != 1)
      throw FormatError("unknown or missing model format_version");
    Model m;
    const auto& c = j.at("config");
    m.config.vocab_size = c.at("vocab_size").get<std::size_t>();
    m.config.embed_dim = c.at("embed_dim").get<std::size_t>();
    m.config.max_positions = c.at("max_positions").get<std::size_t>();
    m.config.noise_sigma = c.at("noise_sigma").get<double>();
    m.config.frame_dup = c.at("frame_dup").get<std::size_t>();
    m.config.scorer_kind = scorer_kind_from_string(c.at("scorer_kind").get<std::string>());
    m.vocabulary = PhonemeVocabulary(c.value("phonemes", std::vector<std::string>{}));
    m.config.validate();
    if (!m.vocabulary.symbols().empty() && m.vocabulary.vocab_size() != m.config.vocab_size)
      throw FormatError("phoneme list does not match vocab_size");

    m.params.text_embedding = detail::matrix_from_json(j.at("text_embedding"), "text_embedding");
    m.params.audio_projection = detail::matrix_from_json(j.at("audio_projection"), "audio_projection");
    const auto weights = detail::scoring_weights_from_json(j.at("scorer"), m.config.max_positions);
    if (weights.kind != m.config.scorer_kind)
      throw FormatError("scorer kind does not match config.scorer_kind");
    if (weights.kind == ScorerKind::Eps) {
      m.params.scorer = Matrix(1, weights.width());
      for (std::size_t d = 0; d < weights.width(); ++d) m.params.scorer(0, d) = weights.rows(0, d);
    } else {
      m.params.scorer = weights.rows;
    }
    m.params.bias = weights.bias;

    const std::size_t V = m.config.vocab_size, D = m.config.embed_dim;
    const std::size_t scorer_rows = weights.kind == ScorerKind::Eps ? 1 : m.config.max_positions;
    if (m.params.text_embedding.rows() != V || m.params.text_embedding.cols() != D ||
        m.params.audio_projection.rows() != D || m.params.audio_projection.cols() != V ||
        m.params.scorer.rows() != scorer_rows || m.params.scorer.cols() != D)
      throw FormatError("parameter shapes do not match the model config");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  } catch (const VocabularyError& e) {
    throw FormatError(e.what());
  } catch (const LengthError& e) {
    throw FormatError(e.what());
  } catch (const NumericError& e) {
    throw FormatError(e.what());
  }
}

void save_model(const std::filesystem::path& path, const Model& model) {
  write_file_atomic(path, model_to_string(model));
}

Model load_model(const std::filesystem::path& path) {
  return model_from_string(read_text_file(path));
}

double predict(const Model& model, const PairRecord& record, Rng& rng) {
  const auto ex = make_example(record, model.vocabulary);
  const auto noise = sample_audio_noise(ex.query.size(), model.config, rng);
  return forward(ex, model.params, model.config, noise).probability;
}

std::vector<AlignedFeatureSample> export_aligned_features(const Model& model,
                                                          std::span<const PairRecord> records,
                                                          std::size_t count, std::uint64_t seed,
                                                          bool* truncated) {
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (truncated) *truncated = count > records.size();
  if (count < records.size()) {
    auto rng = make_rng(seed);
    for (std::size_t i = 0; i < count; ++i)
      std::swap(order[i], order[i + uniform_index(rng, order.size() - i)]);
    order.resize(count);
  }
  std::vector<AlignedFeatureSample> out;
  out.reserve(order.size());
  const Matrix no_noise;
  for (const auto i : order) {
    const auto& r = records[i];
    if (r.anchor_phonemes.size() > model.config.max_positions || r.query_phonemes.empty()) continue;
    const auto ex = make_example(r, model.vocabulary);
    out.push_back(forward(ex, model.params, model.config, no_noise).aligned_features);
  }
  return out;
}

}  // namespace pob
