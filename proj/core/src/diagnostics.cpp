#include "pob/diagnostics.hpp"

#include <cmath>
#include <sstream>

#include "json_io.hpp"
#include "pob/error.hpp"
#include "pob/util.hpp"

namespace pob {

namespace {

// Neumaier summation keeps prefix sums of equal terms exact to the last ulp.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::vector<double> prefix_sums(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  CompensatedSum acc;
  for (std::size_t i = 0; i < v.size(); ++i) {
    acc.add(v[i]);
    out[i] = acc.value();
  }
  return out;
}

}  // namespace

std::string_view to_string(ScorerKind kind) {
  return kind == ScorerKind::Eps ? "eps" : "baseline";
}

ScorerKind scorer_kind_from_string(std::string_view name) {
  if (name == "baseline") return ScorerKind::Baseline;
  if (name == "eps") return ScorerKind::Eps;
  throw FormatError("unknown scorer kind '" + std::string(name) + "'");
}

void ScoringWeights::validate() const {
  if (rows.rows() == 0 || rows.cols() == 0)
    throw DiagnosticError("scoring weights need m >= 1 and n >= 1");
  for (double v : rows.values())
    if (!std::isfinite(v)) throw DiagnosticError("scoring weights must be finite");
  if (kind == ScorerKind::Eps) {
    for (std::size_t i = 1; i < rows.rows(); ++i)
      for (std::size_t c = 0; c < rows.cols(); ++c)
        if (rows(i, c) != rows(0, c))
          throw DiagnosticError("eps weights must share one row across positions");
  }
}

ScoringWeights ScoringWeights::eps(std::span<const double> w, double bias, std::size_t m) {
  ScoringWeights out{Matrix(m, w.size()), bias, ScorerKind::Eps};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t c = 0; c < w.size(); ++c) out.rows(i, c) = w[c];
  return out;
}

std::vector<double> weight_norms(const ScoringWeights& weights) {
  std::vector<double> out(weights.positions());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto row = weights.rows.row(i);
    out[i] = std::sqrt(dot(row, row));
  }
  return out;
}

double prefix_concentration(const ScoringWeights& weights, std::size_t k) {
  const std::size_t m = weights.positions();
  if (k < 1 || k > m)
    throw DiagnosticError("prefix length k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(m) + "]");
  const auto sums = prefix_sums(weight_norms(weights));
  if (sums.back() <= 0.0) throw DiagnosticError("rho is undefined for all-zero weights");
  return sums[k - 1] / sums.back();
}

std::vector<double> contributions(const ScoringWeights& weights,
                                  std::span<const AlignedFeatureSample> samples) {
  if (samples.empty()) throw DiagnosticError("contributions need at least one sample");
  const std::size_t m = weights.positions();
  std::vector<CompensatedSum> acc(m);
  for (const auto& s : samples) {
    if (s.features.rows() != m || s.features.cols() != weights.width())
      throw DiagnosticError("feature sample shape does not match the scoring weights");
    for (std::size_t i = 0; i < m; ++i)
      acc[i].add(std::abs(dot(weights.rows.row(i), s.features.row(i))));
  }
  std::vector<double> out(m);
  CompensatedSum total;
  for (std::size_t i = 0; i < m; ++i) {
    out[i] = acc[i].value() / static_cast<double>(samples.size());
    total.add(out[i]);
  }
  if (total.value() <= 0.0)
    throw DiagnosticError("all expected contributions are zero");
  for (auto& c : out) c /= total.value();
  return out;
}

ConcentrationCurve concentration_curve(const ScoringWeights& weights) {
  const std::size_t m = weights.positions();
  if (m == 0) throw DiagnosticError("scoring weights have no positions");
  const auto sums = prefix_sums(weight_norms(weights));
  if (sums.back() <= 0.0) throw DiagnosticError("rho is undefined for all-zero weights");
  ConcentrationCurve curve;
  CompensatedSum excess;
  for (std::size_t k = 1; k <= m; ++k) {
    const double fraction = static_cast<double>(k) / static_cast<double>(m);
    const double rho = sums[k - 1] / sums.back();
    curve.points.push_back({k, fraction, rho});
    excess.add((rho - fraction) / static_cast<double>(m));
  }
  curve.excess_area = excess.value();
  return curve;
}

ScoringWeights scoring_weights_from_string(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("invalid weights JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("weights document must be a JSON object");
  if (j.contains("format_version") && j["format_version"] != 1)
    throw FormatError("unknown format_version " + j["format_version"].dump());
  try {
    if (j.contains("scorer")) {
      std::optional<std::size_t> m;
      if (j.contains("config") && j["config"].contains("max_positions"))
        m = j["config"]["max_positions"].get<std::size_t>();
      return detail::scoring_weights_from_json(j["scorer"], m);
    }
    return detail::scoring_weights_from_json(j, std::nullopt);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed weights document: ") + e.what());
  }
}

ScoringWeights load_scoring_weights(const std::filesystem::path& path) {
  return scoring_weights_from_string(read_text_file(path));
}

std::string scoring_weights_to_string(const ScoringWeights& weights) {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["kind"] = std::string(to_string(weights.kind));
  if (weights.kind == ScorerKind::Eps) {
    const auto row = weights.rows.row(0);
    j["w"] = std::vector<double>(row.begin(), row.end());
    j["m"] = weights.positions();
  } else {
    j["rows"] = detail::matrix_to_json(weights.rows);
  }
  j["bias"] = weights.bias;
  return j.dump(2) + "\n";
}

std::string diagnostics_csv(std::span<const double> norms, std::span<const double> contrib,
                            const ConcentrationCurve& curve) {
  std::ostringstream out;
  out << "i,norm,C_i,k_over_m,rho\n";
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    out << p.k << ',' << format_double(i < norms.size() ? norms[i] : 0.0) << ','
        << format_double(i < contrib.size() ? contrib[i] : 0.0) << ','
        << format_double(p.fraction) << ',' << format_double(p.rho) << '\n';
  }
  return out.str();
}

}  // namespace pob
