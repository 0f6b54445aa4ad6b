#include "pob/training.hpp"

#include <cmath>
#include <set>

#include "json.hpp"
#include "pob/error.hpp"

namespace pob {

std::string report_to_string(const TrainReport& r) {
  nlohmann::ordered_json j;
  j["steps"] = r.steps;
  j["losses"] = r.losses;
  j["train_acc"] = r.train_acc;
  j["val_acc"] = r.val_acc;
  j["seed"] = r.seed;
  j["train_examples"] = r.train_examples;
  j["val_examples"] = r.val_examples;
  j["skipped_records"] = r.skipped_records;
  return j.dump(2) + "\n";
}

Adam::Adam(const MatcherParams& shape, const TrainOptions& options)
    : options_(options), m_(shape.zeros_like()), v_(shape.zeros_like()) {}

void Adam::step(MatcherParams& params, const MatcherParams& grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  auto update = [&](std::span<double> p, std::span<const double> g, std::span<double> m,
                    std::span<double> v) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = options_.beta1 * m[i] + (1.0 - options_.beta1) * g[i];
      v[i] = options_.beta2 * v[i] + (1.0 - options_.beta2) * g[i] * g[i];
      p[i] -= options_.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + options_.epsilon);
    }
  };
  update(params.text_embedding.values(), grad.text_embedding.values(), m_.text_embedding.values(),
         v_.text_embedding.values());
  update(params.audio_projection.values(), grad.audio_projection.values(),
         m_.audio_projection.values(), v_.audio_projection.values());
  update(params.scorer.values(), grad.scorer.values(), m_.scorer.values(), v_.scorer.values());
  update(std::span<double>(&params.bias, 1), std::span<const double>(&grad.bias, 1),
         std::span<double>(&m_.bias, 1), std::span<double>(&v_.bias, 1));
}

double evaluate_accuracy(std::span<const Example> examples, const MatcherParams& params,
                         const MatcherConfig& config, Rng& rng) {
  if (examples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& ex : examples) {
    const auto noise = sample_audio_noise(ex.query.size(), config, rng);
    const bool predicted = forward(ex, params, config, noise).probability >= 0.5;
    if (predicted == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

TrainResult train(std::span<const Example> train_set, std::span<const Example> val_set,
                  const MatcherConfig& config, const TrainOptions& options) {
  config.validate();
  if (train_set.empty()) throw TrainingError(0, "no training examples");
  if (options.batch == 0) throw TrainingError(0, "batch size must be positive");

  auto rng = make_rng(options.seed);
  TrainResult result{init_params(config, rng), {}};
  result.report.seed = options.seed;
  result.report.train_examples = train_set.size();
  result.report.val_examples = val_set.size();
  Adam adam(result.params, options);

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t cursor = order.size();
  double epoch_loss = 0.0;
  std::size_t epoch_batches = 0;
  std::vector<Example> batch;
  batch.reserve(options.batch);

  for (std::size_t step = 0; step < options.steps; ++step) {
    batch.clear();
    while (batch.size() < options.batch && batch.size() < train_set.size()) {
      if (cursor == order.size()) {
        if (epoch_batches) {
          result.report.losses.push_back(epoch_loss / static_cast<double>(epoch_batches));
          epoch_loss = 0.0;
          epoch_batches = 0;
        }
        shuffle(order, rng);
        cursor = 0;
      }
      batch.push_back(train_set[order[cursor++]]);
    }
    LossAndGrad lg;
    try {
      lg = loss_and_grad(batch, result.params, config, rng);
    } catch (const NumericError& e) {
      throw TrainingError(step, e.what());
    }
    adam.step(result.params, lg.grad);
    epoch_loss += lg.loss;
    ++epoch_batches;
  }
  if (epoch_batches) result.report.losses.push_back(epoch_loss / static_cast<double>(epoch_batches));
  result.report.steps = options.steps;

  auto eval_rng = make_rng(options.seed, 1);
  result.report.train_acc = evaluate_accuracy(train_set, result.params, config, eval_rng);
  result.report.val_acc = evaluate_accuracy(val_set, result.params, config, eval_rng);
  return result;
}

ModelTrainResult train_model(std::span<const PairRecord> train_records,
                             std::span<const PairRecord> val_records, MatcherConfig config,
                             const TrainOptions& options,
                             std::span<const std::string> extra_symbols) {
  if (train_records.empty()) throw TrainingError(0, "no training records");
  std::set<std::string> symbols(extra_symbols.begin(), extra_symbols.end());
  for (const auto* set : {&train_records, &val_records})
    for (const auto& r : *set) {
      symbols.insert(r.anchor_phonemes.begin(), r.anchor_phonemes.end());
      symbols.insert(r.query_phonemes.begin(), r.query_phonemes.end());
    }
  PhonemeVocabulary vocab(std::vector<std::string>(symbols.begin(), symbols.end()));
  config.vocab_size = vocab.vocab_size();

  std::size_t skipped = 0;
  auto convert = [&](std::span<const PairRecord> records) {
    std::vector<Example> out;
    for (const auto& r : records) {
      if (r.anchor_phonemes.size() > config.max_positions || r.anchor_phonemes.empty() ||
          r.query_phonemes.empty()) {
        ++skipped;
        continue;
      }
      out.push_back(make_example(r, vocab));
    }
    return out;
  };
  auto train_set = convert(train_records);
  std::vector<Example> val_set;
  if (val_records.empty()) {
    auto split_rng = make_rng(options.seed, 2);
    shuffle(train_set, split_rng);
    const auto n_val =
        static_cast<std::size_t>(std::floor(options.val_fraction * static_cast<double>(train_set.size())));
    val_set.assign(train_set.end() - static_cast<std::ptrdiff_t>(n_val), train_set.end());
    train_set.resize(train_set.size() - n_val);
  } else {
    val_set = convert(val_records);
  }

  auto trained = train(train_set, val_set, config, options);
  trained.report.skipped_records = skipped;
  return {Model{config, std::move(vocab), std::move(trained.params)}, trained.report};
}

}  // namespace pob
