#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pob/matcher.hpp"

namespace pob {

/// Central finite differences of batch_loss against loss_and_grad, per
/// parameter block. relative_error = ||analytic - numeric|| /
/// max(||analytic||, ||numeric||, 1e-12).
struct BlockCheck {
  std::string name;
  std::size_t entries = 0;
  double relative_error = 0.0;
  double max_abs_error = 0.0;
};

struct GradCheckResult {
  std::vector<BlockCheck> blocks;
  double worst_relative_error() const;
  bool passed(double tolerance) const { return worst_relative_error() <= tolerance; }
};

GradCheckResult check_gradients(std::span<const Example> batch, const MatcherParams& params,
                                const MatcherConfig& config, std::span<const Matrix> noises,
                                double step = 1e-5);

struct GradCheckSuiteOptions {
  std::size_t vocab_size = 10;
  std::size_t embed_dim = 4;
  std::size_t max_positions = 6;
  std::size_t configs = 20;
  std::size_t batch = 3;
  std::uint64_t seed = 0;
  double tolerance = 1e-4;
  double step = 1e-5;
};

struct GradCheckCase {
  ScorerKind kind = ScorerKind::Eps;
  double noise_sigma = 0.0;
  GradCheckResult result;
};

/// Random small configurations alternating scorer kinds; cases 2,3 mod 4
/// use a frozen nonzero noise draw, the rest are noise-free.
std::vector<GradCheckCase> run_gradcheck_suite(const GradCheckSuiteOptions& options);

}  // namespace pob
