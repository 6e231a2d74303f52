#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cloze/corpus.hpp"

namespace cloze {

// Distinct lowercase technical terms with train-corpus occurrence counts.
// `terms` is kept sorted so lookups and persisted artifacts are
// order-stable.
struct TermDictionary {
  std::vector<std::string> terms;  // sorted, unique, lowercase, no whitespace
  std::unordered_map<std::string, std::uint64_t> frequencies;  // entry per term

  bool contains(const std::string& term) const;
  std::size_t size() const { return terms.size(); }
};

// Lower-cases each component description, splits on every character outside
// [a-z0-9], drops blocklisted connectives, dedups. Frequencies start at 0.
TermDictionary build_dictionary(std::span<const ComplaintRecord> records,
                                const std::vector<std::string>& blocklist);

// Whole-word occurrence counts of every term over normalized narratives;
// multiple occurrences in one narrative each count. Returns a dictionary
// whose counts are input counts plus the occurrences found here, so shard
// counts add up.
TermDictionary count_term_frequencies(const TermDictionary& dictionary,
                                      std::span<const std::string> narratives);

// Descending frequency, ties broken lexicographically.
std::vector<std::pair<std::string, std::uint64_t>> top_terms(const TermDictionary& dictionary,
                                                             std::size_t k);

// Two-column CSV (term,frequency) sorted by descending frequency then term,
// preceded by a "# config_hash=..." comment line.
void save_dictionary_csv(const TermDictionary& dictionary, const std::filesystem::path& path,
                         const std::string& config_hash);
TermDictionary load_dictionary_csv(const std::filesystem::path& path,
                                   std::string* config_hash = nullptr);

}  // namespace cloze
