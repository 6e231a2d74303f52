#include "cloze/probe.hpp"

#include <unordered_set>

#include "cloze/error.hpp"
#include "cloze/jsonl.hpp"
#include "cloze/text.hpp"

namespace cloze {

std::vector<std::vector<std::string>> segment_sentences(std::string_view narrative) {
  std::vector<std::vector<std::string>> out;
  std::string current;
  auto flush = [&]() {
    auto words = whitespace_tokenize(current);
    if (!words.empty()) out.push_back(std::move(words));
    current.clear();
  };
  for (std::size_t i = 0; i < narrative.size(); ++i) {
    const char c = narrative[i];
    const bool final_punct = (c == '.' || c == '!' || c == '?');
    if (final_punct) {
      const bool at_end = i + 1 == narrative.size();
      const char next = at_end ? ' ' : narrative[i + 1];
      if (at_end || next == ' ' || next == '\t' || next == '\n' || next == '\r' ||
          next == '\f' || next == '\v') {
        flush();
        continue;
      }
    }
    current.push_back(c);
  }
  flush();
  return out;
}

std::string render_masked(std::span<const std::string> words, std::size_t mask_index) {
  std::string out = kClsToken;
  for (std::size_t i = 0; i < words.size(); ++i) {
    out.push_back(' ');
    out += (i == mask_index) ? kMaskToken : words[i];
  }
  out.push_back(' ');
  out += kSepToken;
  return out;
}

std::string unmask(const std::string& rendered, const std::string& ground_truth) {
  ParsedRendered parsed = parse_rendered(rendered);
  parsed.words[parsed.mask_index] = ground_truth;
  return join_words(parsed.words);
}

ProbeSet generate_probes(std::span<const ComplaintRecord> heldout,
                         const TermDictionary& dictionary, GenerationStats* stats) {
  require(dictionary.size() > 0, "generate_probes: empty dictionary");
  ProbeSet set;
  GenerationStats local;
  std::unordered_set<std::string> seen;  // rendered \x1f truth
  for (const auto& rec : heldout) {
    ++local.records;
    const auto sentences = segment_sentences(rec.narrative);
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      ++local.sentences;
      const auto& words = sentences[s];
      for (std::size_t w = 0; w < words.size(); ++w) {
        if (!dictionary.contains(words[w])) continue;
        ++local.term_occurrences;
        Probe probe;
        probe.probe_id = rec.record_id + ":s" + std::to_string(s) + ":w" + std::to_string(w);
        probe.source_record_id = rec.record_id;
        probe.sentence = words;
        probe.mask_word_index = w;
        probe.ground_truth = words[w];
        probe.rendered = render_masked(words, w);
        if (!seen.insert(probe.rendered + '\x1f' + probe.ground_truth).second) {
          ++local.duplicates_removed;
          continue;
        }
        set.probes.push_back(std::move(probe));
      }
    }
  }
  if (stats) *stats = local;
  require(!set.probes.empty(),
          "generate_probes: no probes generated (dictionary of ", dictionary.size(),
          " terms matched nothing across ", local.sentences, " sentences from ", local.records,
          " records; dictionary/corpus mismatch?)");
  return set;
}

SingleTokenFilterOutcome filter_single_token(const ProbeSet& probes,
                                             const MaskedLmBackend& backend) {
  const BackendDescriptor& desc = backend.descriptor();
  SingleTokenFilterOutcome out;
  out.backend_id = desc.backend_id;
  out.kept.generator_config_hash = probes.generator_config_hash;
  out.kept.source_split = probes.source_split;
  for (const auto& probe : probes.probes) {
    const Tokenization tok = backend.tokenize_words(probe.sentence);
    std::size_t pieces = 0;
    std::string piece;
    for (std::size_t i = 0; i < tok.tokens.size(); ++i) {
      if (tok.word_index[i] == static_cast<int>(probe.mask_word_index)) {
        ++pieces;
        piece = tok.tokens[i];
      }
    }
    const bool unk = !desc.unknown_token.empty() && piece == desc.unknown_token;
    if (pieces == 1 && !unk) {
      out.kept.probes.push_back(probe);
      ++out.retained;
    } else {
      ++out.dropped;
    }
  }
  require(out.retained > 0, "filter_single_token: 0% retention under backend '",
          desc.backend_id, "' (tokenizer mismatch?)");
  out.retention =
      static_cast<double>(out.retained) / static_cast<double>(out.retained + out.dropped);
  return out;
}

void save_probes(const ProbeSet& probes, const std::filesystem::path& path,
                 const std::string& config_hash) {
  json meta{{"kind", "probes"},
            {"config_hash", config_hash},
            {"generator_config_hash", probes.generator_config_hash},
            {"source_split", probes.source_split},
            {"count", probes.probes.size()}};
  JsonlWriter writer(path, meta);
  for (const auto& p : probes.probes) {
    writer.write(json{{"probe_id", p.probe_id},
                      {"source_record_id", p.source_record_id},
                      {"rendered", p.rendered},
                      {"ground_truth", p.ground_truth},
                      {"mask_word_index", p.mask_word_index}});
  }
  writer.close();
}

ProbeSet load_probes(const std::filesystem::path& path, std::string* config_hash) {
  ProbeSet set;
  std::unordered_set<std::string> ids;
  const json meta = read_jsonl(path, [&](const json& j) {
    Probe p;
    p.probe_id = j.at("probe_id").get<std::string>();
    p.source_record_id = j.at("source_record_id").get<std::string>();
    p.rendered = j.at("rendered").get<std::string>();
    p.ground_truth = j.at("ground_truth").get<std::string>();
    p.mask_word_index = j.at("mask_word_index").get<std::size_t>();
    const ParsedRendered parsed = parse_rendered(p.rendered);
    require(parsed.mask_index == p.mask_word_index, "probe ", p.probe_id,
            ": mask_word_index disagrees with rendered string");
    p.sentence = parsed.words;
    p.sentence[p.mask_word_index] = p.ground_truth;
    require(ids.insert(p.probe_id).second, "duplicate probe_id: ", p.probe_id);
    set.probes.push_back(std::move(p));
  });
  if (meta.is_object()) {
    set.generator_config_hash = meta.value("generator_config_hash", "");
    set.source_split = meta.value("source_split", "heldout");
    if (config_hash) *config_hash = meta.value("config_hash", "");
  }
  require(!set.probes.empty(), "probe file has no probes: ", path.string());
  return set;
}

}  // namespace cloze
