// pobkit: command-line front end for partial-overlap dataset generation,
// toy matcher training, scoring, evaluation and prefix-bias diagnostics.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pob/diagnostics.hpp"
#include "pob/error.hpp"
#include "pob/generator.hpp"
#include "pob/gradcheck.hpp"
#include "pob/manifest.hpp"
#include "pob/matcher.hpp"
#include "pob/metrics.hpp"
#include "pob/phoneme.hpp"
#include "pob/svg.hpp"
#include "pob/training.hpp"
#include "pob/util.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kComputation = 3 };

/// Resolved flags of one run, echoed into every output's metadata.
using RunConfig = std::vector<std::pair<std::string, std::string>>;

std::string str(const fs::path& p) { return p.string(); }

/// Writes <out>.run.json next to a non-manifest output.
std::string run_sidecar(const std::string& subcommand, const RunConfig& config,
                        const std::map<std::string, fs::path>& inputs) {
  ordered_json j;
  j["subcommand"] = subcommand;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  j["config"] = cfg;
  ordered_json in = ordered_json::object();
  for (const auto& [name, path] : inputs) in[name] = {{"path", str(path)}, {"checksum", pob::file_checksum(path)}};
  j["inputs"] = in;
  return j.dump(2) + "\n";
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  return fs::path(p.string() + suffix);
}

// ---------------------------------------------------------------- gen-spark

struct GenSparkArgs {
  fs::path dict, words, out;
  std::size_t n_pairs = 1000, l_max = 25, max_distance = 2, shards = 1, candidate_factor = 20;
  std::string bins = pob::BinSpec::defaults().str();
  std::optional<std::size_t> per_bin;
  std::uint64_t seed = 0;
};

int run_gen_spark(const GenSparkArgs& a) {
  pob::SparkConfig cfg;
  cfg.n_pairs = a.n_pairs;
  cfg.l_max = a.l_max;
  cfg.max_distance = a.max_distance;
  cfg.bins = pob::BinSpec::parse(a.bins);
  cfg.per_bin = a.per_bin;
  cfg.seed = a.seed;
  cfg.shards = a.shards;
  cfg.candidate_factor = a.candidate_factor;

  const auto lexicon = pob::load_lexicon_file(a.dict);
  const auto words = pob::read_word_list(a.words);
  const auto result = pob::generate_spark(lexicon, words, cfg);

  pob::ManifestMeta meta;
  meta.seed = a.seed;
  meta.l_max = a.l_max;
  meta.max_distance = a.max_distance;
  meta.bins = cfg.bins;
  meta.dict_checksum = pob::file_checksum(a.dict);
  meta.word_list_checksum = pob::file_checksum(a.words);
  const auto& s = result.report.sampling;
  meta.generation_report.per_bin_counts = s.selected;
  for (const auto b : s.skipped_bins) meta.generation_report.skipped_bins.push_back(
      std::to_string(cfg.bins.ranges[b].lo) + "-" + std::to_string(cfg.bins.ranges[b].hi));
  meta.generation_report.retries = result.report.retries;
  meta.config = {{"dict", str(a.dict)},
                 {"words", str(a.words)},
                 {"n_pairs", std::to_string(a.n_pairs)},
                 {"l_max", std::to_string(a.l_max)},
                 {"max_distance", std::to_string(a.max_distance)},
                 {"bins", cfg.bins.str()},
                 {"per_bin", a.per_bin ? std::to_string(*a.per_bin) : "derived"},
                 {"seed", std::to_string(a.seed)},
                 {"shards", std::to_string(a.shards)},
                 {"candidate_factor", std::to_string(a.candidate_factor)}};
  pob::write_manifest(a.out, result.records, meta);

  std::cout << "records: " << result.records.size() << "\n"
            << "candidates: " << result.report.candidates
            << " (duplicates " << result.report.duplicates << ", retries "
            << result.report.retries << ", unbinned " << s.unbinned << ")\n";
  for (std::size_t b = 0; b < cfg.bins.size(); ++b)
    std::cout << "bin " << cfg.bins.ranges[b].lo << "-" << cfg.bins.ranges[b].hi
              << ": available " << s.available[b] << ", selected " << s.selected[b] << "\n";
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
  return kOk;
}

// ------------------------------------------------------------------- gen-lp

struct GenLpArgs {
  fs::path in, words, dict, out;
  std::uint64_t seed = 0;
  bool fallback = false;
};

int run_gen_lp(const GenLpArgs& a) {
  const auto lexicon = pob::load_lexicon_file(a.dict);
  const auto words = pob::read_word_list(a.words);
  const auto rows = pob::read_lp_rows(a.in);
  auto rng = pob::make_rng(a.seed);
  pob::LpOptions options;
  options.fallback = a.fallback;
  pob::LpReport report;
  const auto records = pob::generate_pob_lp(rows, words, lexicon, rng, options, &report);

  pob::ManifestMeta meta;
  meta.seed = a.seed;
  meta.dict_checksum = pob::file_checksum(a.dict);
  meta.word_list_checksum = pob::file_checksum(a.words);
  meta.generation_report.retries = report.retries;
  meta.config = {{"in", str(a.in)},
                 {"in_checksum", pob::file_checksum(a.in)},
                 {"words", str(a.words)},
                 {"dict", str(a.dict)},
                 {"seed", std::to_string(a.seed)},
                 {"fallback", a.fallback ? "true" : "false"}};
  pob::write_manifest(a.out, records, meta);

  std::cout << "records: " << records.size() << "\n"
            << "positives: " << report.positives << ", ignored negatives: "
            << report.ignored_negatives << ", mismatched positives: "
            << report.mismatched_positives << ", duplicates: " << report.duplicates
            << ", retries: " << report.retries << "\n";
  return kOk;
}

// ------------------------------------------------------------------ analyze

struct AnalyzeArgs {
  fs::path in, out_csv, out_svg;
  std::string bins = pob::BinSpec::defaults().str();
  std::string title = "First-different phoneme index";
  std::string labels = "negative";
};

int run_analyze(const AnalyzeArgs& a) {
  const auto bins = pob::BinSpec::parse(a.bins);
  std::vector<pob::PairRecord> records;
  for (auto& r : pob::read_records(a.in))
    if (a.labels == "all" || r.label == (a.labels == "positive")) records.push_back(std::move(r));
  const auto h = pob::first_diff_histogram(records, bins);

  const RunConfig cfg = {{"in", str(a.in)}, {"bins", bins.str()}, {"labels", a.labels}};
  std::string svg_doc;
  if (!a.out_svg.empty()) {
    std::vector<std::string> labels;
    for (const auto& r : bins.ranges) labels.push_back(std::to_string(r.lo) + "-" + std::to_string(r.hi));
    pob::svg::Chart chart{a.title, "first-different phoneme index", "ratio", 0.0, 1.0};
    svg_doc = pob::svg::bar_chart(chart, labels, h.ratios);
  }
  pob::write_file_atomic(a.out_csv, pob::histogram_csv(h));
  pob::write_file_atomic(with_suffix(a.out_csv, ".run.json"), run_sidecar("analyze", cfg, {{"in", a.in}}));
  if (!a.out_svg.empty()) pob::write_file_atomic(a.out_svg, svg_doc);

  std::cout << "records: " << h.total << ", overflow: " << h.overflow << "\n";
  for (std::size_t b = 0; b < bins.size(); ++b)
    std::cout << bins.ranges[b].lo << "-" << bins.ranges[b].hi << ": "
              << pob::format_double(h.ratios[b]) << "\n";
  return kOk;
}

// -------------------------------------------------------------------- train

struct TrainArgs {
  fs::path manifest, val_manifest, dict, out_model, out_report;
  std::string scorer = "eps";
  std::size_t dim = 16, m = 25, steps = 2000, batch = 64, frame_dup = 2;
  double lr = 0.01, noise = 0.1, val_fraction = 0.1;
  std::uint64_t seed = 0;
};

int run_train(const TrainArgs& a) {
  pob::MatcherConfig config;
  config.embed_dim = a.dim;
  config.max_positions = a.m;
  config.noise_sigma = a.noise;
  config.frame_dup = a.frame_dup;
  config.scorer_kind = pob::scorer_kind_from_string(a.scorer);

  pob::TrainOptions options;
  options.steps = a.steps;
  options.batch = a.batch;
  options.learning_rate = a.lr;
  options.seed = a.seed;
  options.val_fraction = a.val_fraction;

  const auto train_records = pob::read_records(a.manifest);
  std::vector<pob::PairRecord> val_records;
  if (!a.val_manifest.empty()) val_records = pob::read_records(a.val_manifest);
  std::vector<std::string> extra;
  if (!a.dict.empty()) {
    const auto lexicon = pob::load_lexicon_file(a.dict);
    extra.assign(lexicon.inventory().begin(), lexicon.inventory().end());
  }
  const auto result = pob::train_model(train_records, val_records, config, options, extra);

  RunConfig cfg = {{"manifest", str(a.manifest)},
                   {"val_manifest", a.val_manifest.empty() ? "split" : str(a.val_manifest)},
                   {"dict", str(a.dict)},
                   {"scorer", a.scorer},
                   {"dim", std::to_string(a.dim)},
                   {"m", std::to_string(a.m)},
                   {"steps", std::to_string(a.steps)},
                   {"batch", std::to_string(a.batch)},
                   {"lr", pob::format_double(a.lr)},
                   {"noise", pob::format_double(a.noise)},
                   {"frame_dup", std::to_string(a.frame_dup)},
                   {"val_fraction", pob::format_double(a.val_fraction)},
                   {"seed", std::to_string(a.seed)}};
  std::map<std::string, fs::path> inputs = {{"manifest", a.manifest}};
  if (!a.val_manifest.empty()) inputs["val_manifest"] = a.val_manifest;
  if (!a.dict.empty()) inputs["dict"] = a.dict;

  const auto model_text = pob::model_to_string(result.model);
  pob::write_file_atomic(a.out_model, model_text);
  pob::write_file_atomic(with_suffix(a.out_model, ".run.json"), run_sidecar("train", cfg, inputs));
  if (!a.out_report.empty()) pob::write_file_atomic(a.out_report, pob::report_to_string(result.report));

  const auto& r = result.report;
  std::cout << "scorer: " << a.scorer << ", parameters: " << result.model.params.parameter_count()
            << " (scorer head " << result.model.params.scorer_parameter_count() << ")\n"
            << "examples: train " << r.train_examples << ", val " << r.val_examples
            << ", skipped " << r.skipped_records << "\n"
            << "final epoch loss: " << (r.losses.empty() ? 0.0 : r.losses.back()) << "\n"
            << "train_acc: " << r.train_acc << ", val_acc: " << r.val_acc << "\n";
  return kOk;
}

// ---------------------------------------------------------------- gradcheck

int run_gradcheck(const pob::GradCheckSuiteOptions& o) {
  const auto cases = pob::run_gradcheck_suite(o);
  bool ok = true;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& k = cases[c];
    const bool pass = k.result.passed(o.tolerance);
    ok = ok && pass;
    std::cout << "case " << c << " " << pob::to_string(k.kind) << " sigma="
              << pob::format_double(k.noise_sigma) << ": ";
    for (const auto& b : k.result.blocks) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2e", b.relative_error);
      std::cout << b.name << "=" << buf << " ";
    }
    std::cout << (pass ? "ok" : "FAILED") << "\n";
  }
  std::cout << (ok ? "all cases passed" : "gradient check failed") << " (tolerance "
            << o.tolerance << ")\n";
  return ok ? kOk : kComputation;
}

// ----------------------------------------------------------------- diagnose

struct DiagnoseArgs {
  fs::path model, manifest, out_csv, out_svg, out_weights;
  std::size_t samples = 256;
  std::uint64_t seed = 0;
};

int run_diagnose(const DiagnoseArgs& a) {
  const auto model = pob::load_model(a.model);
  const auto records = pob::read_records(a.manifest);
  const auto weights = pob::export_scoring_weights(model.params, model.config);
  bool truncated = false;
  const auto samples =
      pob::export_aligned_features(model, records, a.samples, a.seed, &truncated);
  if (truncated)
    std::cerr << "warning: requested " << a.samples << " samples, manifest has "
              << records.size() << "; using all records\n";

  const auto norms = pob::weight_norms(weights);
  const auto contrib = pob::contributions(weights, samples);
  const auto curve = pob::concentration_curve(weights);

  std::string svg_doc;
  if (!a.out_svg.empty()) {
    const int w = 480, h = 320;
    std::vector<std::string> labels;
    for (std::size_t i = 1; i <= contrib.size(); ++i)
      labels.push_back(i == 1 || i % 5 == 0 ? std::to_string(i) : "");
    double c_max = 0.0;
    for (const double c : contrib) c_max = std::max(c_max, c);
    pob::svg::Chart left{"Position-wise contributions C_i", "position i", "C_i", 0.0,
                         c_max > 0 ? c_max * 1.1 : 1.0, w, h};
    pob::svg::Series rho{"rho(k)", {}, {}, "#d62728"};
    pob::svg::Series identity{"k/m", {}, {}, "#7f7f7f", true};
    rho.x.push_back(0.0);
    rho.y.push_back(0.0);
    identity.x = {0.0, 1.0};
    identity.y = {0.0, 1.0};
    for (const auto& p : curve.points) {
      rho.x.push_back(p.fraction);
      rho.y.push_back(p.rho);
    }
    pob::svg::Chart right{"Prefix concentration", "k/m", "rho(k)", 0.0, 1.0, w, h};
    const std::vector<pob::svg::Series> series = {identity, rho};
    svg_doc = pob::svg::side_by_side(pob::svg::bar_chart(left, labels, contrib),
                                     pob::svg::line_chart(right, series), w, h);
  }

  const RunConfig cfg = {{"model", str(a.model)},
                         {"manifest", str(a.manifest)},
                         {"samples", std::to_string(a.samples)},
                         {"samples_used", std::to_string(samples.size())},
                         {"seed", std::to_string(a.seed)},
                         {"excess_area", pob::format_double(curve.excess_area)}};
  pob::write_file_atomic(a.out_csv, pob::diagnostics_csv(norms, contrib, curve));
  pob::write_file_atomic(with_suffix(a.out_csv, ".run.json"),
                         run_sidecar("diagnose", cfg, {{"model", a.model}, {"manifest", a.manifest}}));
  if (!a.out_svg.empty()) pob::write_file_atomic(a.out_svg, svg_doc);
  if (!a.out_weights.empty())
    pob::write_file_atomic(a.out_weights, pob::scoring_weights_to_string(weights));

  std::cout << "scorer: " << pob::to_string(weights.kind) << ", m = " << weights.positions()
            << ", samples: " << samples.size() << "\n"
            << "rho(5) = " << pob::format_double(curve.points[std::min<std::size_t>(5, curve.points.size()) - 1].rho)
            << ", excess area = " << pob::format_double(curve.excess_area) << "\n";
  return kOk;
}

// -------------------------------------------------------------------- score

struct ScoreArgs {
  fs::path model, manifest, out;
  std::uint64_t seed = 0;
};

int run_score(const ScoreArgs& a) {
  const auto model = pob::load_model(a.model);
  const auto records = pob::read_records(a.manifest);
  auto rng = pob::make_rng(a.seed);
  std::vector<pob::ScoreEntry> scores;
  scores.reserve(records.size());
  std::size_t skipped = 0;
  for (const auto& r : records) {
    if (r.anchor_phonemes.size() > model.config.max_positions) {
      ++skipped;
      continue;
    }
    scores.push_back({r.id, pob::predict(model, r, rng), r.label});
  }
  if (skipped)
    std::cerr << "warning: skipped " << skipped << " records with anchors longer than m = "
              << model.config.max_positions << "\n";

  const RunConfig cfg = {{"model", str(a.model)}, {"manifest", str(a.manifest)},
                         {"seed", std::to_string(a.seed)},
                         {"skipped_long_anchors", std::to_string(skipped)}};
  pob::write_file_atomic(a.out, pob::scores_to_csv(scores));
  pob::write_file_atomic(with_suffix(a.out, ".run.json"),
                         run_sidecar("score", cfg, {{"model", a.model}, {"manifest", a.manifest}}));
  std::cout << "scored " << scores.size() << " records\n";
  return kOk;
}

// --------------------------------------------------------------------- eval

struct EvalArgs {
  fs::path scores, dev_scores, out;
  double threshold = 0.5;
};

int run_eval(const EvalArgs& a) {
  const auto scores = pob::read_scores(a.scores);
  double threshold = a.threshold;
  std::map<std::string, fs::path> inputs = {{"scores", a.scores}};
  if (!a.dev_scores.empty()) {
    threshold = pob::eer_point(pob::read_scores(a.dev_scores)).threshold;
    inputs["dev_scores"] = a.dev_scores;
  }
  const auto summary = pob::summarize(scores, threshold);
  const auto text = pob::metrics_to_string(summary);
  if (!a.out.empty()) {
    const RunConfig cfg = {{"scores", str(a.scores)},
                           {"dev_scores", str(a.dev_scores)},
                           {"threshold", pob::format_double(threshold)}};
    pob::write_file_atomic(a.out, text);
    pob::write_file_atomic(with_suffix(a.out, ".run.json"), run_sidecar("eval", cfg, inputs));
  }
  std::cout << text;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pobkit: partial-overlap benchmark generation, toy matcher training and "
               "prefix-bias diagnostics"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", "pobkit 0.1.0");

  GenSparkArgs spark;
  auto* gs = app.add_subcommand("gen-spark", "Generate a POB-Spark text manifest (JSONL + sidecar)");
  gs->add_option("--dict", spark.dict, "CMU-format pronouncing dictionary")->required();
  gs->add_option("--words", spark.words, "Word pool, one word per line")->required();
  gs->add_option("--n-pairs", spark.n_pairs, "Target number of phrase pairs (3 records each)");
  gs->add_option("--l-max", spark.l_max, "Phrase phoneme budget (phrases stay strictly below)");
  gs->add_option("--max-distance", spark.max_distance, "Max phoneme edit distance for neighbor substitution");
  gs->add_option("--bins", spark.bins, "Inclusive first-diff bins, e.g. 0-4,5-9");
  gs->add_option("--per-bin", spark.per_bin, "Pairs per bin (default: n-pairs spread evenly)");
  gs->add_option("--seed", spark.seed, "Random seed");
  gs->add_option("--shards", spark.shards, "Candidate generation streams (part of the reproducibility key)");
  gs->add_option("--candidate-factor", spark.candidate_factor, "Candidate attempts per requested pair");
  gs->add_option("--out", spark.out, "Output manifest (.jsonl); sidecar goes to <stem>.meta.json")->required();

  GenLpArgs lp;
  auto* gl = app.add_subcommand("gen-lp", "Derive POB-LP partial-overlap negatives from LibriPhrase-style rows");
  gl->add_option("--in", lp.in, "LibriPhrase-style rows (.csv with header, or .jsonl)")->required();
  gl->add_option("--words", lp.words, "Common words to append, one per line")->required();
  gl->add_option("--dict", lp.dict, "CMU-format pronouncing dictionary")->required();
  gl->add_option("--seed", lp.seed, "Random seed");
  gl->add_flag("--fallback", lp.fallback, "Letter-rule pronunciations for words missing from the dictionary");
  gl->add_option("--out", lp.out, "Output manifest (.jsonl)")->required();

  AnalyzeArgs an;
  auto* az = app.add_subcommand("analyze", "First-diff index histogram of a manifest");
  az->add_option("--in", an.in, "Input manifest (.jsonl)")->required();
  az->add_option("--bins", an.bins, "Inclusive bins, e.g. 0-4,5-9");
  az->add_option("--labels", an.labels, "Records counted, by label")
      ->check(CLI::IsMember({"negative", "positive", "all"}));
  az->add_option("--title", an.title, "SVG chart title");
  az->add_option("--out-csv", an.out_csv, "Histogram CSV (bin_lo,bin_hi,ratio)")->required();
  az->add_option("--out-svg", an.out_svg, "Optional SVG bar chart");

  TrainArgs tr;
  auto* tn = app.add_subcommand("train", "Train the toy matcher on a manifest");
  tn->add_option("--manifest", tr.manifest, "Training manifest (.jsonl)")->required();
  tn->add_option("--val-manifest", tr.val_manifest, "Validation manifest (default: hold out --val-fraction)");
  tn->add_option("--dict", tr.dict, "Dictionary whose phoneme inventory seeds the vocabulary");
  tn->add_option("--scorer", tr.scorer, "Scoring head")->check(CLI::IsMember({"baseline", "eps"}));
  tn->add_option("--dim", tr.dim, "Embedding dimension D");
  tn->add_option("--m", tr.m, "Scoring positions m (longer anchors are skipped)");
  tn->add_option("--steps", tr.steps, "Optimizer steps");
  tn->add_option("--batch", tr.batch, "Batch size");
  tn->add_option("--lr", tr.lr, "Adam learning rate");
  tn->add_option("--noise", tr.noise, "Audio surrogate noise standard deviation");
  tn->add_option("--frame-dup", tr.frame_dup, "Audio frames per query phoneme");
  tn->add_option("--val-fraction", tr.val_fraction, "Held-out share when no --val-manifest is given");
  tn->add_option("--seed", tr.seed, "Random seed (initialization, batches, noise)");
  tn->add_option("--out-model", tr.out_model, "Output parameter file (JSON)")->required();
  tn->add_option("--out-report", tr.out_report, "Optional training report (JSON)");

  pob::GradCheckSuiteOptions gc;
  auto* gk = app.add_subcommand("gradcheck", "Compare analytic gradients with central finite differences");
  gk->add_option("--dim", gc.embed_dim, "Embedding dimension D");
  gk->add_option("--m", gc.max_positions, "Scoring positions m");
  gk->add_option("--vocab", gc.vocab_size, "Vocabulary size V (including padding)");
  gk->add_option("--configs", gc.configs, "Random configurations to check");
  gk->add_option("--batch", gc.batch, "Examples per configuration");
  gk->add_option("--tol", gc.tolerance, "Maximum relative error per parameter block");
  gk->add_option("--seed", gc.seed, "Random seed");

  DiagnoseArgs dg;
  auto* dn = app.add_subcommand("diagnose", "Position-wise contributions and prefix concentration of a model");
  dn->add_option("--model", dg.model, "Trained parameter file")->required();
  dn->add_option("--manifest", dg.manifest, "Manifest supplying aligned features")->required();
  dn->add_option("--samples", dg.samples, "Records sampled for contributions");
  dn->add_option("--seed", dg.seed, "Sampling seed");
  dn->add_option("--out-csv", dg.out_csv, "Diagnostics CSV (i,norm,C_i,k_over_m,rho)")->required();
  dn->add_option("--out-svg", dg.out_svg, "Optional two-panel SVG");
  dn->add_option("--out-weights", dg.out_weights, "Optional exported scoring weights (JSON)");

  ScoreArgs sc;
  auto* so = app.add_subcommand("score", "Score every manifest record with a trained model");
  so->add_option("--model", sc.model, "Trained parameter file")->required();
  so->add_option("--manifest", sc.manifest, "Manifest to score")->required();
  so->add_option("--seed", sc.seed, "Audio surrogate noise seed");
  so->add_option("--out", sc.out, "Score CSV (id,score,label)")->required();

  EvalArgs ev;
  auto* el = app.add_subcommand("eval", "EER, AUC and accuracy of a score file");
  el->add_option("--scores", ev.scores, "Score CSV (id,score,label)")->required();
  el->add_option("--threshold", ev.threshold, "Accuracy threshold (accept when score >= threshold)");
  el->add_option("--dev-scores", ev.dev_scores, "Calibrate the threshold at the EER point of this score CSV");
  el->add_option("--out", ev.out, "Optional metrics JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gs) return run_gen_spark(spark);
    if (*gl) return run_gen_lp(lp);
    if (*az) return run_analyze(an);
    if (*tn) return run_train(tr);
    if (*gk) return run_gradcheck(gc);
    if (*dn) return run_diagnose(dg);
    if (*so) return run_score(sc);
    if (*el) return run_eval(ev);
  } catch (const pob::Error& e) {
    const bool input = e.kind() == pob::ErrorKind::Input;
    std::cerr << (input ? "input error: " : "computation error: ") << e.what() << "\n";
    return input ? kInput : kComputation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kComputation;
  }
  return kUsage;
}
