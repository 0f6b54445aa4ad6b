#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pob/matcher.hpp"
#include "pob/phoneme.hpp"

namespace pob {

struct TrainOptions {
  std::size_t steps = 2000;
  std::size_t batch = 64;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  /// Share of records held out for validation when no split is given.
  double val_fraction = 0.1;
};

struct TrainReport {
  std::size_t steps = 0;
  std::vector<double> losses;  // mean batch loss per epoch
  double train_acc = 0.0;
  double val_acc = 0.0;
  std::uint64_t seed = 0;
  std::size_t train_examples = 0;
  std::size_t val_examples = 0;
  std::size_t skipped_records = 0;  // anchors longer than max_positions
};

std::string report_to_string(const TrainReport& report);

/// Adam with bias correction over every MatcherParams tensor.
class Adam {
 public:
  Adam(const MatcherParams& shape, const TrainOptions& options);
  void step(MatcherParams& params, const MatcherParams& grad);

 private:
  TrainOptions options_;
  MatcherParams m_;
  MatcherParams v_;
  std::size_t t_ = 0;
};

/// Fraction classified correctly at probability threshold 0.5.
double evaluate_accuracy(std::span<const Example> examples, const MatcherParams& params,
                         const MatcherConfig& config, Rng& rng);

struct TrainResult {
  MatcherParams params;
  TrainReport report;
};

/// Deterministic given options.seed. Throws TrainingError on divergence.
TrainResult train(std::span<const Example> train_set, std::span<const Example> val_set,
                  const MatcherConfig& config, const TrainOptions& options);

struct ModelTrainResult {
  Model model;
  TrainReport report;
};

/// Builds the phoneme vocabulary (records plus optional extra symbols),
/// drops records whose anchor exceeds max_positions, and trains. With an
/// empty validation span, the last val_fraction of a seeded shuffle of the
/// training records is held out.
ModelTrainResult train_model(std::span<const PairRecord> train_records,
                             std::span<const PairRecord> val_records, MatcherConfig config,
                             const TrainOptions& options,
                             std::span<const std::string> extra_symbols = {});

}  // namespace pob
