#include "pob/manifest.hpp"

#include <set>
#include <sstream>

#include "json.hpp"
#include "pob/error.hpp"

namespace pob {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

namespace {

constexpr const char* kRecordFields[] = {"id",           "anchor_text",     "query_text",
                                         "anchor_phonemes", "query_phonemes", "first_diff_index",
                                         "label",        "source",          "audio_path"};

PhonemeSeq phonemes_from(const json& v, const char* field, std::size_t line) {
  if (!v.is_array()) throw FormatError(std::string(field) + " must be an array", line);
  PhonemeSeq out;
  for (const auto& t : v) {
    if (!t.is_string() || t.get_ref<const std::string&>().empty())
      throw FormatError(std::string(field) + " must hold non-empty strings", line);
    out.tokens.push_back(t.get<std::string>());
  }
  return out;
}

std::string lower_ext(const std::filesystem::path& p) { return to_lower(p.extension().string()); }

bool parse_label(const std::string& raw, std::size_t line) {
  const auto v = to_lower(raw);
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw FormatError("label must be 0/1/true/false, got '" + raw + "'", line);
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& manifest) {
  auto p = manifest;
  p.replace_extension(".meta.json");
  return p;
}

std::string record_to_json_line(const PairRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["anchor_text"] = r.anchor_text;
  j["query_text"] = r.query_text;
  j["anchor_phonemes"] = r.anchor_phonemes.tokens;
  j["query_phonemes"] = r.query_phonemes.tokens;
  j["first_diff_index"] = r.first_diff_index;
  j["label"] = r.label;
  j["source"] = std::string(to_string(r.source));
  j["audio_path"] = r.audio_path ? ordered_json(*r.audio_path) : ordered_json(nullptr);
  return j.dump();
}

PairRecord record_from_json_line(std::string_view line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what(), line_no);
  }
  if (!j.is_object()) throw FormatError("record must be a JSON object", line_no);
  for (const auto* f : kRecordFields)
    if (!j.contains(f)) throw FormatError(std::string("missing field \"") + f + "\"", line_no);
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const auto* f : kRecordFields) known = known || key == f;
    if (!known) throw FormatError("unknown field \"" + key + "\"", line_no);
  }

  auto str = [&](const char* f) {
    if (!j[f].is_string()) throw FormatError(std::string(f) + " must be a string", line_no);
    return j[f].get<std::string>();
  };
  PairRecord r;
  r.id = str("id");
  if (r.id.empty()) throw FormatError("id must be non-empty", line_no);
  r.anchor_text = str("anchor_text");
  r.query_text = str("query_text");
  r.anchor_phonemes = phonemes_from(j["anchor_phonemes"], "anchor_phonemes", line_no);
  r.query_phonemes = phonemes_from(j["query_phonemes"], "query_phonemes", line_no);
  if (!j["first_diff_index"].is_number_unsigned())
    throw FormatError("first_diff_index must be a nonnegative integer", line_no);
  r.first_diff_index = j["first_diff_index"].get<std::size_t>();
  if (!j["label"].is_boolean()) throw FormatError("label must be a boolean", line_no);
  r.label = j["label"].get<bool>();
  try {
    r.source = source_from_string(str("source"));
  } catch (const FormatError& e) {
    throw FormatError(e.what(), line_no);
  }
  const auto& audio = j["audio_path"];
  if (audio.is_string()) {
    r.audio_path = audio.get<std::string>();
  } else if (!audio.is_null()) {
    throw FormatError("audio_path must be a string or null", line_no);
  }
  return r;
}

void validate_records(std::span<const PairRecord> records) {
  std::set<std::string_view> ids;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.id.empty()) throw FormatError("record " + std::to_string(i) + " has an empty id");
    if (!ids.insert(r.id).second) throw FormatError("duplicate record id '" + r.id + "'");
    if (first_diff_index(r.anchor_phonemes, r.query_phonemes) != r.first_diff_index)
      throw FormatError("record '" + r.id + "' has an inconsistent first_diff_index");
  }
}

std::string manifest_to_string(std::span<const PairRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json_line(r);
    out += '\n';
  }
  return out;
}

std::vector<PairRecord> manifest_from_string(std::string_view text) {
  std::vector<PairRecord> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos)
      out.push_back(record_from_json_line(line, line_no));
    start = end + 1;
  }
  return out;
}

std::string meta_to_string(const ManifestMeta& meta) {
  ordered_json j;
  j["format_version"] = meta.format_version;
  j["seed"] = meta.seed ? ordered_json(*meta.seed) : ordered_json(nullptr);
  j["l_max"] = meta.l_max ? ordered_json(*meta.l_max) : ordered_json(nullptr);
  j["max_distance"] = meta.max_distance ? ordered_json(*meta.max_distance) : ordered_json(nullptr);
  if (meta.bins) {
    ordered_json bins = ordered_json::array();
    for (const auto& r : meta.bins->ranges) bins.push_back({r.lo, r.hi});
    j["bins"] = bins;
  } else {
    j["bins"] = nullptr;
  }
  j["dict_checksum"] = meta.dict_checksum;
  j["word_list_checksum"] = meta.word_list_checksum;
  j["generation_report"] = {{"per_bin_counts", meta.generation_report.per_bin_counts},
                            {"skipped_bins", meta.generation_report.skipped_bins},
                            {"retries", meta.generation_report.retries}};
  ordered_json config = ordered_json::object();
  for (const auto& [k, v] : meta.config) config[k] = v;
  j["config"] = config;
  return j.dump(2) + "\n";
}

ManifestMeta meta_from_string(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid sidecar JSON: ") + e.what());
  }
  try {
    ManifestMeta m;
    if (!j.contains("format_version") || j["format_version"] != kManifestFormatVersion)
      throw FormatError("unknown format_version " +
                        (j.contains("format_version") ? j["format_version"].dump() : "<missing>"));
    if (!j["seed"].is_null()) m.seed = j["seed"].get<std::uint64_t>();
    if (!j["l_max"].is_null()) m.l_max = j["l_max"].get<std::size_t>();
    if (!j["max_distance"].is_null()) m.max_distance = j["max_distance"].get<std::size_t>();
    if (!j["bins"].is_null()) {
      BinSpec bins;
      for (const auto& r : j["bins"])
        bins.ranges.push_back({r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>()});
      bins.validate();
      m.bins = bins;
    }
    m.dict_checksum = j.at("dict_checksum").get<std::string>();
    m.word_list_checksum = j.at("word_list_checksum").get<std::string>();
    const auto& rep = j.at("generation_report");
    m.generation_report.per_bin_counts = rep.at("per_bin_counts").get<std::vector<std::size_t>>();
    m.generation_report.skipped_bins = rep.at("skipped_bins").get<std::vector<std::string>>();
    m.generation_report.retries = rep.at("retries").get<std::size_t>();
    if (j.contains("config")) {
      for (const auto& [k, v] : j["config"].items()) m.config.emplace_back(k, v.get<std::string>());
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed sidecar: ") + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, std::span<const PairRecord> records,
                    const ManifestMeta& meta) {
  validate_records(records);
  // Sidecar first: a manifest without metadata is never left behind.
  write_file_atomic(sidecar_path(path), meta_to_string(meta));
  write_file_atomic(path, manifest_to_string(records));
}

std::pair<std::vector<PairRecord>, ManifestMeta> read_manifest(
    const std::filesystem::path& path) {
  auto records = read_records(path);
  auto meta = meta_from_string(read_text_file(sidecar_path(path)));
  return {std::move(records), std::move(meta)};
}

std::vector<PairRecord> read_records(const std::filesystem::path& path) {
  return manifest_from_string(read_text_file(path));
}

std::vector<LpRow> lp_rows_from_csv(std::string_view text) {
  const auto rows = parse_csv(text);
  if (rows.empty()) return {};
  const auto& header = rows.front();
  auto column = [&](std::initializer_list<const char*> names) -> std::optional<std::size_t> {
    for (const char* n : names)
      for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == n) return i;
    return std::nullopt;
  };
  const auto anchor = column({"anchor_text"});
  const auto query = column({"query_text", "comparison_text"});
  const auto label = column({"label", "target"});
  const auto audio = column({"audio_path", "comparison"});
  if (!anchor || !query || !label)
    throw FormatError("CSV header needs anchor_text, query_text|comparison_text, label|target", 1);

  std::vector<LpRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t line = r + 1;
    auto cell = [&](std::size_t c) -> const std::string& {
      if (c >= row.size()) throw FormatError("row has too few columns", line);
      return row[c];
    };
    LpRow lp{TokenSeq::parse(cell(*anchor)), TokenSeq::parse(cell(*query)),
             parse_label(cell(*label), line), std::nullopt};
    if (audio && *audio < row.size() && !row[*audio].empty()) lp.audio_path = row[*audio];
    out.push_back(std::move(lp));
  }
  return out;
}

std::vector<LpRow> lp_rows_from_jsonl(std::string_view text) {
  std::vector<LpRow> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    auto pick = [&](std::initializer_list<const char*> names) -> const json* {
      for (const char* n : names)
        if (j.contains(n)) return &j[n];
      return nullptr;
    };
    const json* anchor = pick({"anchor_text"});
    const json* query = pick({"query_text", "comparison_text"});
    const json* label = pick({"label", "target"});
    const json* audio = pick({"audio_path", "comparison"});
    if (!anchor || !query || !label || !anchor->is_string() || !query->is_string())
      throw FormatError("row needs anchor_text, query_text and label", line_no);
    bool lab = false;
    if (label->is_boolean()) {
      lab = label->get<bool>();
    } else if (label->is_number_integer()) {
      lab = parse_label(std::to_string(label->get<long long>()), line_no);
    } else if (label->is_string()) {
      lab = parse_label(label->get<std::string>(), line_no);
    } else {
      throw FormatError("label must be boolean, 0/1 or a string", line_no);
    }
    LpRow row{TokenSeq::parse(anchor->get<std::string>()),
              TokenSeq::parse(query->get<std::string>()), lab, std::nullopt};
    if (audio && audio->is_string()) row.audio_path = audio->get<std::string>();
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<LpRow> read_lp_rows(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  const auto ext = lower_ext(path);
  if (ext == ".csv") return lp_rows_from_csv(text);
  if (ext == ".jsonl" || ext == ".json") return lp_rows_from_jsonl(text);
  throw FormatError("unsupported LibriPhrase-style input '" + path.string() +
                    "' (expected .csv or .jsonl)");
}

}  // namespace pob
