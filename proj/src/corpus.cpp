#include "cloze/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "cloze/error.hpp"
#include "cloze/rng.hpp"
#include "cloze/text.hpp"

namespace cloze {

namespace {

std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

struct ResolvedSchema {
  std::size_t id = 0;
  std::size_t narrative = 0;
  std::size_t component = 0;
  std::size_t source = 0;
  int date = -1;
  std::size_t max_index = 0;
};

bool all_positional(const OdiSchema& s) {
  bool pos = s.id.positional();
  for (const FieldRef* f : {&s.narrative, &s.component, &s.source}) {
    if (f->positional() != pos) fail("schema mixes positional and named fields");
  }
  if (s.date.present() && s.date.positional() != pos)
    fail("schema mixes positional and named fields");
  return pos;
}

std::size_t resolve_named(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == name) return i;
  }
  fail("schema field not found in header: ", name);
}

std::optional<std::string> parse_date(const std::string& raw) {
  const std::string t = trim(raw);
  if (t.empty()) return std::nullopt;
  if (t.size() != 8 || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return std::nullopt;
  return t;
}

}  // namespace

ParsedCorpus parse_odi_flatfile(const std::filesystem::path& path, const OdiSchema& schema) {
  for (const auto& [field, ref] : {std::pair{"id", &schema.id},
                                   std::pair{"narrative", &schema.narrative},
                                   std::pair{"component", &schema.component},
                                   std::pair{"source", &schema.source}}) {
    require(ref->present(), "schema is missing required field: ", field);
  }
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "complaint file not found: ", path.string());

  const bool positional = all_positional(schema);
  ResolvedSchema cols;
  std::string line;

  if (!positional) {
    require(static_cast<bool>(std::getline(in, line)), "file has no header row: ", path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_fields(line, schema.delimiter);
    cols.id = resolve_named(header, schema.id.name);
    cols.narrative = resolve_named(header, schema.narrative.name);
    cols.component = resolve_named(header, schema.component.name);
    cols.source = resolve_named(header, schema.source.name);
    if (schema.date.present()) cols.date = static_cast<int>(resolve_named(header, schema.date.name));
  } else {
    cols.id = static_cast<std::size_t>(schema.id.column);
    cols.narrative = static_cast<std::size_t>(schema.narrative.column);
    cols.component = static_cast<std::size_t>(schema.component.column);
    cols.source = static_cast<std::size_t>(schema.source.column);
    if (schema.date.present()) cols.date = schema.date.column;
  }
  cols.max_index = std::max({cols.id, cols.narrative, cols.component, cols.source,
                             cols.date >= 0 ? static_cast<std::size_t>(cols.date) : 0});

  ParsedCorpus out;
  std::unordered_set<std::string> seen_ids;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++out.stats.rows_total;

    std::size_t replaced = 0;
    const std::string clean = sanitize_utf8(line, &replaced);
    out.stats.invalid_bytes += replaced;

    const auto fields = split_fields(clean, schema.delimiter);
    if (fields.size() <= cols.max_index) {
      ++out.stats.malformed_rows;
      continue;
    }
    ComplaintRecord rec;
    rec.record_id = trim(fields[cols.id]);
    rec.narrative = trim(fields[cols.narrative]);
    rec.component_description = trim(fields[cols.component]);
    rec.source_channel = trim(fields[cols.source]);
    if (cols.date >= 0) rec.received_date = parse_date(fields[static_cast<std::size_t>(cols.date)]);

    if (rec.record_id.empty()) {
      ++out.stats.malformed_rows;
      continue;
    }
    if (rec.narrative.empty()) {
      ++out.stats.empty_narratives;
      continue;
    }
    if (!seen_ids.insert(rec.record_id).second) {
      ++out.stats.duplicate_ids;
      continue;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

FilterOutcome filter_consumer_complaints(std::span<const ComplaintRecord> records,
                                         const FilterConfig& config) {
  std::unordered_set<std::string> keep;
  for (const auto& ch : config.keep_channels) keep.insert(normalize_text(ch));

  FilterOutcome out;
  std::unordered_set<std::string> seen_narratives;
  for (const auto& rec : records) {
    if (!keep.count(normalize_text(rec.source_channel))) {
      ++out.dropped_by_channel;
      continue;
    }
    if (!seen_narratives.insert(normalize_text(rec.narrative)).second) {
      ++out.duplicates_removed;
      continue;
    }
    out.records.push_back(rec);
  }
  return out;
}

std::size_t split_train_size(std::size_t n, double ratio) {
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
}

CorpusSplit split_corpus(std::span<const ComplaintRecord> records, double ratio,
                         std::uint64_t seed) {
  require(!records.empty(), "split_corpus: empty input");
  require(ratio > 0.0 && ratio < 1.0, "split_corpus: ratio must be in (0,1), got ", ratio);

  // Canonical order by record_id so the split is independent of how the
  // caller produced the record list.
  std::vector<std::size_t> by_id(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) by_id[i] = i;
  std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) {
    return records[a].record_id < records[b].record_id;
  });

  const auto perm = shuffle_indices(records.size(), seed);
  const std::size_t train_n = split_train_size(records.size(), ratio);

  CorpusSplit split;
  split.split_seed = seed;
  split.ratio = ratio;
  split.train.reserve(train_n);
  split.heldout.reserve(records.size() - train_n);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ComplaintRecord& rec = records[by_id[perm[i]]];
    if (i < train_n) {
      split.train.push_back(rec);
    } else {
      split.heldout.push_back(rec);
    }
  }
  return split;
}

LengthDescriptives corpus_stats(std::span<const std::size_t> lengths,
                                const std::string& unit_label) {
  require(!lengths.empty(), "corpus_stats: no sequences");
  std::vector<std::size_t> sorted(lengths.begin(), lengths.end());
  std::sort(sorted.begin(), sorted.end());

  const std::size_t n = sorted.size();
  auto nearest_rank = [&](double p) {
    std::size_t rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    return sorted[rank - 1];
  };

  long double sum = 0.0L;
  for (std::size_t v : sorted) sum += static_cast<long double>(v);

  LengthDescriptives d;
  d.mean = static_cast<double>(sum / static_cast<long double>(n));
  d.minimum = sorted.front();
  d.q25 = nearest_rank(0.25);
  d.median = nearest_rank(0.50);
  d.q75 = nearest_rank(0.75);
  d.maximum = sorted.back();
  d.unit_label = unit_label;
  return d;
}

LengthDescriptives corpus_stats(std::span<const std::vector<std::string>> token_sequences,
                                const std::string& unit_label) {
  std::vector<std::size_t> lengths;
  lengths.reserve(token_sequences.size());
  for (const auto& seq : token_sequences) lengths.push_back(seq.size());
  return corpus_stats(lengths, unit_label);
}

}  // namespace cloze
