#include "pob/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace pob {

double GradCheckResult::worst_relative_error() const {
  double worst = 0.0;
  for (const auto& b : blocks) worst = std::max(worst, b.relative_error);
  return worst;
}

GradCheckResult check_gradients(std::span<const Example> batch, const MatcherParams& params,
                                const MatcherConfig& config, std::span<const Matrix> noises,
                                double step) {
  const auto analytic = loss_and_grad(batch, params, config, noises).grad;
  MatcherParams probe = params;

  auto check_block = [&](const char* name, std::span<double> values,
                         std::span<const double> grads) {
    BlockCheck out{name, values.size(), 0.0, 0.0};
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + step;
      const double up = batch_loss(batch, probe, config, noises);
      values[i] = saved - step;
      const double down = batch_loss(batch, probe, config, noises);
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double d = grads[i] - numeric;
      diff2 += d * d;
      a2 += grads[i] * grads[i];
      n2 += numeric * numeric;
      out.max_abs_error = std::max(out.max_abs_error, std::abs(d));
    }
    out.relative_error =
        std::sqrt(diff2) / std::max({std::sqrt(a2), std::sqrt(n2), 1e-12});
    return out;
  };

  GradCheckResult result;
  result.blocks.push_back(check_block("text_embedding", probe.text_embedding.values(),
                                      analytic.text_embedding.values()));
  result.blocks.push_back(check_block("audio_projection", probe.audio_projection.values(),
                                      analytic.audio_projection.values()));
  result.blocks.push_back(check_block("scorer", probe.scorer.values(), analytic.scorer.values()));
  double bias_grad = analytic.bias;
  result.blocks.push_back(
      check_block("bias", std::span<double>(&probe.bias, 1), std::span<const double>(&bias_grad, 1)));
  return result;
}

std::vector<GradCheckCase> run_gradcheck_suite(const GradCheckSuiteOptions& options) {
  std::vector<GradCheckCase> cases;
  auto rng = make_rng(options.seed);
  for (std::size_t c = 0; c < options.configs; ++c) {
    MatcherConfig config;
    config.vocab_size = options.vocab_size;
    config.embed_dim = options.embed_dim;
    config.max_positions = options.max_positions;
    config.frame_dup = 1 + uniform_index(rng, 2);
    config.scorer_kind = c % 2 == 0 ? ScorerKind::Baseline : ScorerKind::Eps;
    config.noise_sigma = (c / 2) % 2 == 0 ? 0.0 : 0.1;

    const auto params = init_params(config, rng, 0.5);
    std::vector<Example> batch(options.batch);
    std::vector<Matrix> noises;
    for (auto& ex : batch) {
      const std::size_t p = 1 + uniform_index(rng, config.max_positions);
      const std::size_t q = 1 + uniform_index(rng, config.max_positions);
      for (std::size_t i = 0; i < p; ++i)
        ex.anchor.push_back(1 + static_cast<int>(uniform_index(rng, config.vocab_size - 1)));
      for (std::size_t i = 0; i < q; ++i)
        ex.query.push_back(1 + static_cast<int>(uniform_index(rng, config.vocab_size - 1)));
      ex.label = uniform_index(rng, 2) == 1;
      if (config.noise_sigma > 0.0) noises.push_back(sample_audio_noise(q, config, rng));
    }
    cases.push_back({config.scorer_kind, config.noise_sigma,
                     check_gradients(batch, params, config, noises, options.step)});
  }
  return cases;
}

}  // namespace pob
