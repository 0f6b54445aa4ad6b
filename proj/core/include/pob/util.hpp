#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace pob {

/// All stochastic operations take this engine by reference so that results
/// are a pure function of the seed.
using Rng = std::mt19937_64;

/// Independent stream for (seed, shard).
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

// Portable draws: the std distributions are implementation-defined, these are
// not, so generated files stay identical across standard libraries.

/// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);
/// Uniform real in [lo, hi).
double uniform_real(Rng& rng, double lo, double hi);
/// Standard normal via Box-Muller.
double standard_normal(Rng& rng);

template <class T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = uniform_index(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

/// "fnv1a64:<16 hex digits>" over the file's bytes.
std::string file_checksum(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over the target, so a
/// failed run never leaves a partially written output. Missing parent
/// directories are created.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest decimal representation that round-trips.
std::string format_double(double value);

/// One lowercase word per line; blank lines and surrounding spaces ignored.
std::vector<std::string> read_word_list(const std::filesystem::path& path);

/// RFC 4180 style CSV: comma separated, double-quoted fields may contain
/// commas, quotes ("") and newlines.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);
std::string csv_escape(std::string_view field);

}  // namespace pob
