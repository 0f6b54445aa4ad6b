#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pob/generator.hpp"

namespace pob {

inline constexpr int kManifestFormatVersion = 1;

struct GenerationReport {
  std::vector<std::size_t> per_bin_counts;
  std::vector<std::string> skipped_bins;
  std::size_t retries = 0;

  bool operator==(const GenerationReport&) const = default;
};

/// Sidecar metadata written next to every manifest.
struct ManifestMeta {
  int format_version = kManifestFormatVersion;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> l_max;
  std::optional<std::size_t> max_distance;
  std::optional<BinSpec> bins;
  std::string dict_checksum;
  std::string word_list_checksum;
  GenerationReport generation_report;
  /// Resolved run configuration, echoed verbatim (flag -> value).
  std::vector<std::pair<std::string, std::string>> config;

  bool operator==(const ManifestMeta&) const = default;
};

/// "x.jsonl" -> "x.meta.json".
std::filesystem::path sidecar_path(const std::filesystem::path& manifest);

/// One JSON object per line with the fields, in order: id, anchor_text,
/// query_text, anchor_phonemes, query_phonemes, first_diff_index, label,
/// source, audio_path.
std::string record_to_json_line(const PairRecord& record);
/// Throws FormatError (carrying line) on any schema violation.
PairRecord record_from_json_line(std::string_view line, std::size_t line_no);

/// Throws FormatError if ids repeat or a stored first_diff_index disagrees
/// with the stored phonemes.
void validate_records(std::span<const PairRecord> records);

std::string manifest_to_string(std::span<const PairRecord> records);
std::vector<PairRecord> manifest_from_string(std::string_view text);

std::string meta_to_string(const ManifestMeta& meta);
ManifestMeta meta_from_string(std::string_view text);

/// Writes the JSONL manifest and its sidecar atomically.
void write_manifest(const std::filesystem::path& path, std::span<const PairRecord> records,
                    const ManifestMeta& meta);
std::pair<std::vector<PairRecord>, ManifestMeta> read_manifest(
    const std::filesystem::path& path);
/// JSONL only; no sidecar required.
std::vector<PairRecord> read_records(const std::filesystem::path& path);

/// LibriPhrase-style rows from CSV (header required) or JSONL. Column
/// mapping: anchor text <- anchor_text; query text <- query_text or
/// comparison_text; label <- label or target (1/0/true/false); audio path
/// <- audio_path or comparison (optional).
std::vector<LpRow> read_lp_rows(const std::filesystem::path& path);
std::vector<LpRow> lp_rows_from_csv(std::string_view text);
std::vector<LpRow> lp_rows_from_jsonl(std::string_view text);

}  // namespace pob
