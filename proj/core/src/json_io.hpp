#pragma once

// Shared JSON conversions for the model and weight file formats.

#include <cstddef>
#include <optional>
#include <string>

#include "json.hpp"
#include "pob/diagnostics.hpp"
#include "pob/error.hpp"
#include "pob/matrix.hpp"

namespace pob::detail {

inline nlohmann::ordered_json matrix_to_json(const Matrix& m) {
  auto out = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (double v : m.row(r)) row.push_back(v);
    out.push_back(std::move(row));
  }
  return out;
}

inline Matrix matrix_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw FormatError(field + " must be a non-empty array of rows");
  const std::size_t cols = j.front().size();
  Matrix m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw FormatError(field + " rows must all have " + std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw FormatError(field + " entries must be numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

/// {kind, rows, bias} for baseline; {kind, w, m, bias} for eps. A missing
/// "m" in an eps object falls back to m_hint.
inline ScoringWeights scoring_weights_from_json(const nlohmann::json& j,
                                                std::optional<std::size_t> m_hint) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw FormatError("scorer must be an object with a string \"kind\"");
  ScoringWeights w;
  w.kind = scorer_kind_from_string(j["kind"].get<std::string>());
  if (!j.contains("bias") || !j["bias"].is_number())
    throw FormatError("scorer needs a numeric \"bias\"");
  w.bias = j["bias"].get<double>();
  if (w.kind == ScorerKind::Baseline) {
    if (!j.contains("rows")) throw FormatError("baseline scorer needs \"rows\"");
    w.rows = matrix_from_json(j["rows"], "scorer.rows");
  } else if (j.contains("rows")) {
    w.rows = matrix_from_json(j["rows"], "scorer.rows");
  } else {
    if (!j.contains("w") || !j["w"].is_array()) throw FormatError("eps scorer needs \"w\"");
    std::optional<std::size_t> m = m_hint;
    if (j.contains("m")) m = j["m"].get<std::size_t>();
    if (!m || *m == 0) throw FormatError("eps scorer needs a positive position count \"m\"");
    std::vector<double> vec;
    for (const auto& v : j["w"]) {
      if (!v.is_number()) throw FormatError("scorer.w entries must be numbers");
      vec.push_back(v.get<double>());
    }
    w = ScoringWeights::eps(vec, w.bias, *m);
  }
  try {
    w.validate();
  } catch (const DiagnosticError& e) {
    throw FormatError(e.what());
  }
  return w;
}

}  // namespace pob::detail
