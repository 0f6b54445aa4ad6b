#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "pob/error.hpp"
#include "pob/metrics.hpp"
#include "pob/util.hpp"

using namespace pob;

namespace {

std::vector<ScoreEntry> make(std::vector<double> pos, std::vector<double> neg) {
  std::vector<ScoreEntry> out;
  for (const double s : pos) out.push_back({"p" + std::to_string(out.size()), s, true});
  for (const double s : neg) out.push_back({"n" + std::to_string(out.size()), s, false});
  return out;
}

// Oracles: O(n^2) enumeration, independent of the sorted sweeps in the library.
double auc_oracle(const std::vector<ScoreEntry>& s) {
  double wins = 0, pairs = 0;
  for (const auto& p : s)
    for (const auto& n : s)
      if (p.label && !n.label) {
        pairs += 1;
        wins += p.score > n.score ? 1.0 : p.score == n.score ? 0.5 : 0.0;
      }
  return wins / pairs;
}

double eer_oracle(const std::vector<ScoreEntry>& s) {
  std::vector<double> t = {-std::numeric_limits<double>::infinity()};
  for (const auto& e : s) t.push_back(e.score);
  std::sort(t.begin() + 1, t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  t.push_back(std::numeric_limits<double>::infinity());
  std::vector<double> fnr, fpr;
  for (const double th : t) {
    double fn = 0, fp = 0, np = 0, nn = 0;
    for (const auto& e : s) {
      if (e.label) {
        ++np;
        if (e.score < th) ++fn;
      } else {
        ++nn;
        if (e.score >= th) ++fp;
      }
    }
    fnr.push_back(fn / np);
    fpr.push_back(fp / nn);
  }
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (fnr[k] >= fpr[k]) {
      // Intersection of the segments (fnr[k-1],fnr[k]) and (fpr[k-1],fpr[k]).
      const double a = (fpr[k - 1] - fnr[k - 1]) /
                       ((fpr[k - 1] - fnr[k - 1]) - (fpr[k] - fnr[k]));
      return fpr[k - 1] + a * (fpr[k] - fpr[k - 1]);
    }
  }
  return 1.0;
}

std::vector<ScoreEntry> random_scores(Rng& rng) {
  std::vector<ScoreEntry> s;
  const std::size_t n = 2 + uniform_index(rng, 19);
  for (std::size_t i = 0; i < n; ++i)
    s.push_back({std::to_string(i), static_cast<double>(uniform_index(rng, 6)) / 5.0,
                 uniform_index(rng, 2) == 1});
  s[0].label = true;
  s[1].label = false;
  return s;
}

}  // namespace

TEST_CASE("eer hand cases") {
  CHECK(eer(make({0.9, 0.8}, {0.2, 0.1})) == 0.0);
  CHECK(eer(make({0.5, 0.5}, {0.5, 0.5, 0.5})) == 0.5);
  CHECK(eer(make({0.8, 0.4}, {0.6, 0.2})) == 0.5);
  CHECK(eer(make({0.1}, {0.9})) == 1.0);
}

TEST_CASE("auc hand cases") {
  CHECK(auc(make({0.9, 0.8}, {0.2, 0.1})) == 1.0);
  CHECK(auc(make({0.5, 0.5}, {0.5})) == 0.5);
  CHECK(auc(make({0.8, 0.4}, {0.6, 0.2})) == 0.75);
}

TEST_CASE("accuracy hand cases") {
  CHECK(accuracy(make({0.9, 0.8}, {0.2, 0.1})) == 1.0);
  CHECK(accuracy(make({0.2, 0.1}, {0.9, 0.8})) == 0.0);
  CHECK(accuracy(make({0.9, 0.3}, {0.2, 0.1})) == 0.75);
  CHECK(accuracy(make({0.5}, {0.49})) == 1.0);
  CHECK_THROWS_AS(accuracy(std::vector<ScoreEntry>{}), MetricError);
}

TEST_CASE("single-class and non-finite inputs are metric errors") {
  CHECK_THROWS_AS(eer(make({0.1, 0.2}, {})), MetricError);
  CHECK_THROWS_AS(auc(make({}, {0.1})), MetricError);
  CHECK_THROWS_AS(eer(make({std::nan("")}, {0.1})), MetricError);
}

TEST_CASE("metrics match enumeration oracles on random score sets") {
  auto rng = make_rng(77);
  for (int t = 0; t < 300; ++t) {
    const auto s = random_scores(rng);
    CHECK(auc(s) == doctest::Approx(auc_oracle(s)).epsilon(1e-12));
    CHECK(eer(s) == doctest::Approx(eer_oracle(s)).epsilon(1e-12));
  }
}

TEST_CASE("metric invariances") {
  auto rng = make_rng(78);
  for (int t = 0; t < 200; ++t) {
    auto s = random_scores(rng);
    const double e = eer(s), a = auc(s), acc = accuracy(s, 0.5);

    auto mono = s;
    for (auto& x : mono) x.score = std::exp(3.0 * x.score) - 7.0;
    CHECK(eer(mono) == doctest::Approx(e).epsilon(1e-12));
    CHECK(auc(mono) == doctest::Approx(a).epsilon(1e-12));

    auto flipped = s;
    for (auto& x : flipped) x.label = !x.label;
    CHECK(auc(s) + auc(flipped) == doctest::Approx(1.0).epsilon(1e-12));

    auto shifted = s;
    for (auto& x : shifted) x.score += 0.25;
    CHECK(accuracy(shifted, 0.75) == acc);

    auto perm = s;
    shuffle(perm, rng);
    CHECK(eer(perm) == e);
    CHECK(auc(perm) == a);

    CHECK(e >= 0.0);
    CHECK(e <= 1.0);
    if (a == 1.0) CHECK(e == 0.0);
  }
}

TEST_CASE("eer_point threshold calibrates accuracy on separable data") {
  const auto s = make({0.9, 0.7}, {0.3, 0.1});
  const auto p = eer_point(s);
  CHECK(p.eer == 0.0);
  CHECK(accuracy(s, p.threshold) == 1.0);
}

TEST_CASE("first_diff_histogram") {
  std::vector<PairRecord> recs(10);
  CHECK(first_diff_histogram(recs, BinSpec::defaults()).ratios ==
        std::vector<double>{1, 0, 0, 0, 0});
  for (std::size_t i = 0; i < recs.size(); ++i) recs[i].first_diff_index = 3 * i;
  const auto h = first_diff_histogram(recs, BinSpec::defaults());
  CHECK(h.overflow == 1);  // 27
  CHECK(h.counts == std::vector<std::size_t>{2, 2, 1, 2, 2});
  double sum = 0;
  for (const double r : h.ratios) sum += r;
  CHECK(std::abs(sum - 1.0) <= 1e-12);
  CHECK(histogram_csv(h).rfind("bin_lo,bin_hi,ratio\n0,4,0.2222222222222222\n", 0) == 0);

  auto perm = recs;
  auto rng = make_rng(1);
  shuffle(perm, rng);
  CHECK(first_diff_histogram(perm, BinSpec::defaults()).ratios == h.ratios);

  CHECK_THROWS_AS(first_diff_histogram(std::vector<PairRecord>{}, BinSpec::defaults()),
                  MetricError);
}

TEST_CASE("score csv round trip and errors") {
  const auto s = make({0.25, 1e-9}, {-3.5});
  CHECK(scores_from_csv(scores_to_csv(s)) == s);
  CHECK_THROWS_AS(scores_from_csv("id,score\n"), FormatError);
  CHECK_THROWS_AS(scores_from_csv("id,score,label\na,0.1,1\na,0.2,0\n"), FormatError);
  CHECK_THROWS_AS(scores_from_csv("id,score,label\na,x,1\n"), FormatError);
  CHECK_THROWS_AS(scores_from_csv("id,score,label\na,0.1,2\n"), FormatError);
  try {
    scores_from_csv("id,score,label\na,0.1,1\nb,nan,0\n");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("metrics json") {
  const auto m = summarize(make({0.8, 0.4}, {0.6, 0.2}), 0.5);
  CHECK(m.n_pos == 2);
  CHECK(m.n_neg == 2);
  CHECK(m.auc == 0.75);
  CHECK(m.acc == 0.5);
  CHECK(metrics_to_string(m) ==
        "{\n  \"eer\": 0.5,\n  \"auc\": 0.75,\n  \"acc\": 0.5,\n  \"threshold\": 0.5,\n"
        "  \"n_pos\": 2,\n  \"n_neg\": 2\n}\n");
}
