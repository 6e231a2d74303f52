#include "cloze/dictionary.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "cloze/error.hpp"
#include "cloze/text.hpp"

namespace cloze {

bool TermDictionary::contains(const std::string& term) const {
  return std::binary_search(terms.begin(), terms.end(), term);
}

TermDictionary build_dictionary(std::span<const ComplaintRecord> records,
                                const std::vector<std::string>& blocklist) {
  std::set<std::string> blocked(blocklist.begin(), blocklist.end());
  std::set<std::string> terms;
  std::size_t nonempty = 0;
  for (const auto& rec : records) {
    const std::string desc = normalize_text(rec.component_description);
    if (desc.empty()) continue;
    ++nonempty;
    for (auto& word : alnum_words(desc)) {
      if (blocked.count(word)) continue;
      terms.insert(std::move(word));
    }
  }
  require(nonempty > 0, "build_dictionary: all component descriptions are empty");

  TermDictionary dict;
  dict.terms.assign(terms.begin(), terms.end());
  for (const auto& t : dict.terms) dict.frequencies.emplace(t, 0);
  return dict;
}

TermDictionary count_term_frequencies(const TermDictionary& dictionary,
                                      std::span<const std::string> narratives) {
  TermDictionary out = dictionary;
  for (const auto& narrative : narratives) {
    for (const auto& word : alnum_words(narrative)) {
      if (out.contains(word)) ++out.frequencies[word];
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::uint64_t>> top_terms(const TermDictionary& dictionary,
                                                             std::size_t k) {
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  entries.reserve(dictionary.terms.size());
  for (const auto& t : dictionary.terms) entries.emplace_back(t, dictionary.frequencies.at(t));
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (entries.size() > k) entries.resize(k);
  return entries;
}

void save_dictionary_csv(const TermDictionary& dictionary, const std::filesystem::path& path,
                         const std::string& config_hash) {
  std::ofstream out(path);
  require(out.good(), "cannot open for writing: ", path.string());
  out << "# config_hash=" << config_hash << "\n";
  out << "term,frequency\n";
  for (const auto& [term, freq] : top_terms(dictionary, dictionary.terms.size())) {
    out << term << "," << freq << "\n";
  }
  out.flush();
  require(out.good(), "write failed: ", path.string());
}

TermDictionary load_dictionary_csv(const std::filesystem::path& path, std::string* config_hash) {
  std::ifstream in(path);
  require(in.good(), "dictionary file not found: ", path.string());
  TermDictionary dict;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# config_hash=", 0) == 0) {
      if (config_hash) *config_hash = line.substr(std::string("# config_hash=").size());
      continue;
    }
    if (line == "term,frequency") continue;
    const std::size_t comma = line.rfind(',');
    require(comma != std::string::npos, "malformed dictionary row: ", line);
    const std::string term = line.substr(0, comma);
    const std::string count = line.substr(comma + 1);
    try {
      dict.frequencies[term] = std::stoull(count);
    } catch (const std::exception&) {
      fail("malformed frequency in dictionary row: ", line);
    }
    dict.terms.push_back(term);
  }
  require(!dict.terms.empty(), "dictionary file has no terms: ", path.string());
  std::sort(dict.terms.begin(), dict.terms.end());
  dict.terms.erase(std::unique(dict.terms.begin(), dict.terms.end()), dict.terms.end());
  return dict;
}

}  // namespace cloze
