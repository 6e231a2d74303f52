#include "cloze/mock_backend.hpp"

#include <cmath>

#include "cloze/error.hpp"
#include "cloze/jsonl.hpp"
#include "cloze/text.hpp"

namespace cloze {

MockBackend::MockBackend(BackendDescriptor descriptor, double default_score, bool strict)
    : desc_(std::move(descriptor)), default_score_(default_score), strict_(strict) {
  if (desc_.backend_id.empty()) desc_.backend_id = "mock";
  desc_.tokenizer_family = TokenizerFamily::word_level;
  desc_.finalize();
}

MockBackend MockBackend::load(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  BackendDescriptor desc;
  desc.backend_id = j.value("backend_id", "mock");
  desc.candidate_vocabulary = j.at("candidate_vocabulary").get<std::vector<std::string>>();
  desc.max_sequence_length = j.value("max_sequence_length", std::size_t{512});
  MockBackend backend(std::move(desc), j.value("default_score", 0.0), j.value("strict", true));
  if (j.contains("tables")) {
    for (const auto& [probe_id, table] : j.at("tables").items()) {
      ScoreTable scores;
      for (const auto& [token, score] : table.items()) scores[token] = score.get<double>();
      backend.set_table(probe_id, std::move(scores));
    }
  }
  return backend;
}

void MockBackend::set_table(const std::string& probe_id, ScoreTable table) {
  for (const auto& [token, score] : table) {
    require(desc_.has_candidate(token), "mock backend: table for probe '", probe_id,
            "' scores token '", token, "' which is not in the candidate vocabulary");
    require(std::isfinite(score), "mock backend: non-finite score for token '", token, "'");
  }
  tables_[probe_id] = std::move(table);
}

std::vector<std::string> MockBackend::tokenize(const std::string& text) const {
  return whitespace_tokenize(text);
}

Tokenization MockBackend::tokenize_words(std::span<const std::string> words) const {
  Tokenization tok;
  tok.tokens.assign(words.begin(), words.end());
  tok.word_index.resize(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) tok.word_index[i] = static_cast<int>(i);
  return tok;
}

MaskScores MockBackend::predict_masked(const RenderedProbe& probe) const {
  const ParsedRendered parsed = parse_rendered(probe.rendered);
  require(parsed.words.size() + 2 <= desc_.max_sequence_length, "mock backend: probe '",
          probe.probe_id, "' exceeds max_sequence_length");
  const auto it = tables_.find(probe.probe_id);
  if (it == tables_.end() && strict_) {
    fail("mock backend: no score table configured for probe '", probe.probe_id, "'");
  }
  MaskScores result;
  result.probe_id = probe.probe_id;
  result.scores.assign(desc_.candidate_vocabulary.size(), default_score_);
  if (it != tables_.end()) {
    for (const auto& [token, score] : it->second) {
      result.scores[desc_.candidate_index.at(token)] = score;
    }
  }
  return result;
}

double MockBackend::train_mlm_step(std::span<const std::string>, const MaskingConfig&) {
  fail("mock backend does not support training");
}

std::filesystem::path MockBackend::save_checkpoint(const std::filesystem::path& dir,
                                                   const std::string& tag) const {
  std::filesystem::create_directories(dir);
  const auto path = dir / (tag + ".mock.json");
  json tables = json::object();
  for (const auto& [probe_id, table] : tables_) {
    json t = json::object();
    for (const auto& [token, score] : table) t[token] = score;
    tables[probe_id] = std::move(t);
  }
  write_json_file(path, json{{"backend_id", desc_.backend_id},
                             {"candidate_vocabulary", desc_.candidate_vocabulary},
                             {"default_score", default_score_},
                             {"strict", strict_},
                             {"max_sequence_length", desc_.max_sequence_length},
                             {"tables", std::move(tables)}});
  return path;
}

void MockBackend::load_checkpoint(const std::filesystem::path& dir, const std::string& tag) {
  const auto path = dir / (tag + ".mock.json");
  require(std::filesystem::exists(path), "checkpoint not found: ", path.string());
  *this = load(path);
}

}  // namespace cloze
