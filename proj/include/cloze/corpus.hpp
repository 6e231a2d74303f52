#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cloze {

// One ODI complaint row.
struct ComplaintRecord {
  std::string record_id;
  std::string narrative;
  std::string component_description;
  std::string source_channel;
  std::optional<std::string> received_date;
};

// Logical field -> column of the delimiter-separated complaint file.
// Columns are referenced either positionally (headerless file, 0-based) or
// by header name; the two styles cannot be mixed.
struct FieldRef {
  int column = -1;       // >= 0 when positional
  std::string name;      // non-empty when named
  bool positional() const { return column >= 0; }
  bool present() const { return positional() || !name.empty(); }
};

struct OdiSchema {
  FieldRef id;
  FieldRef narrative;
  FieldRef component;
  FieldRef source;
  FieldRef date;  // optional
  char delimiter = '\t';
};

struct ParseStats {
  std::size_t rows_total = 0;
  std::size_t malformed_rows = 0;
  std::size_t empty_narratives = 0;
  std::size_t duplicate_ids = 0;
  std::size_t invalid_bytes = 0;
};

struct ParsedCorpus {
  std::vector<ComplaintRecord> records;
  ParseStats stats;
};

// Parses the flat file. Missing file or absent schema field is fatal;
// structurally broken rows only bump counters.
ParsedCorpus parse_odi_flatfile(const std::filesystem::path& path, const OdiSchema& schema);

struct FilterConfig {
  std::vector<std::string> keep_channels;  // compared on normalized text
};

struct FilterOutcome {
  std::vector<ComplaintRecord> records;
  std::size_t dropped_by_channel = 0;
  std::size_t duplicates_removed = 0;
};

// Keeps records whose source_channel is in the keep set, then removes
// records whose normalized narrative was already seen. Order preserved.
FilterOutcome filter_consumer_complaints(std::span<const ComplaintRecord> records,
                                         const FilterConfig& config);

struct CorpusSplit {
  std::vector<ComplaintRecord> train;
  std::vector<ComplaintRecord> heldout;
  std::uint64_t split_seed = 0;
  double ratio = 0.0;
};

// Train size under the fixed rounding rule: floor(ratio * n).
std::size_t split_train_size(std::size_t n, double ratio);

// Canonicalizes by record_id, applies a seeded permutation, cuts a prefix of
// split_train_size(n, ratio) records for train.
CorpusSplit split_corpus(std::span<const ComplaintRecord> records, double ratio,
                         std::uint64_t seed);

struct LengthDescriptives {
  double mean = 0.0;
  std::size_t minimum = 0;
  std::size_t q25 = 0;
  std::size_t median = 0;
  std::size_t q75 = 0;
  std::size_t maximum = 0;
  std::string unit_label;
};

// Quantiles use the nearest-rank method: q(p) = sorted[ceil(p*n)] (1-based).
LengthDescriptives corpus_stats(std::span<const std::size_t> lengths,
                                const std::string& unit_label);
LengthDescriptives corpus_stats(std::span<const std::vector<std::string>> token_sequences,
                                const std::string& unit_label);

}  // namespace cloze
