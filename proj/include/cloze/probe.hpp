#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cloze/backend.hpp"
#include "cloze/corpus.hpp"
#include "cloze/dictionary.hpp"

namespace cloze {

// One maskable occurrence of a dictionary term.
struct Probe {
  std::string probe_id;
  std::string source_record_id;
  std::vector<std::string> sentence;  // normalized word sequence
  std::size_t mask_word_index = 0;
  std::string ground_truth;
  std::string rendered;  // "[CLS] ... [MASK] ... [SEP]"
};

struct ProbeSet {
  std::vector<Probe> probes;
  std::string generator_config_hash;
  std::string source_split = "heldout";
};

struct GenerationStats {
  std::size_t records = 0;
  std::size_t sentences = 0;
  std::size_t term_occurrences = 0;   // pre-dedup probe count
  std::size_t duplicates_removed = 0;  // byte-identical (rendered, truth) pairs
};

// Splits a normalized narrative on sentence-final {. ! ?} followed by
// whitespace or end of string, then whitespace-tokenizes each sentence.
// Empty sentences are dropped; the boundary character itself is not kept.
std::vector<std::vector<std::string>> segment_sentences(std::string_view narrative);

// One probe per dictionary-term word occurrence, in (record, sentence,
// position) order. Throws when nothing is generated at all.
ProbeSet generate_probes(std::span<const ComplaintRecord> heldout,
                         const TermDictionary& dictionary, GenerationStats* stats = nullptr);

std::string render_masked(std::span<const std::string> words, std::size_t mask_index);

// Inverse of render_masked for a known truth: replaces the mask marker and
// strips the delimiter tokens.
std::string unmask(const std::string& rendered, const std::string& ground_truth);

struct SingleTokenFilterOutcome {
  ProbeSet kept;
  std::size_t retained = 0;
  std::size_t dropped = 0;
  double retention = 0.0;
  std::string backend_id;
};

// Keeps probes whose masked word tokenizes, in sentence context, to exactly
// one token that is not the backend's unknown token. Zero retention is fatal.
SingleTokenFilterOutcome filter_single_token(const ProbeSet& probes,
                                             const MaskedLmBackend& backend);

void save_probes(const ProbeSet& probes, const std::filesystem::path& path,
                 const std::string& config_hash);
ProbeSet load_probes(const std::filesystem::path& path, std::string* config_hash = nullptr);

}  // namespace cloze
