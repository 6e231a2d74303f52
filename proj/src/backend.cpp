#include "cloze/backend.hpp"

#include "cloze/error.hpp"
#include "cloze/jsonl.hpp"
#include "cloze/mock_backend.hpp"
#include "cloze/remote_backend.hpp"
#include "cloze/text.hpp"
#include "cloze/toy_backend.hpp"

namespace cloze {

std::string to_string(TokenizerFamily family) {
  switch (family) {
    case TokenizerFamily::word_piece: return "word-piece";
    case TokenizerFamily::sentence_piece: return "sentence-piece";
    case TokenizerFamily::byte_pair: return "byte-pair";
    case TokenizerFamily::word_level: return "word-level";
  }
  return "word-level";
}

TokenizerFamily tokenizer_family_from_string(const std::string& s) {
  if (s == "word-piece") return TokenizerFamily::word_piece;
  if (s == "sentence-piece") return TokenizerFamily::sentence_piece;
  if (s == "byte-pair") return TokenizerFamily::byte_pair;
  if (s == "word-level") return TokenizerFamily::word_level;
  fail("unknown tokenizer family: ", s);
}

void BackendDescriptor::finalize() {
  require(!candidate_vocabulary.empty(), "backend ", backend_id,
          ": candidate vocabulary must be non-empty");
  candidate_index.clear();
  candidate_index.reserve(candidate_vocabulary.size());
  for (std::size_t i = 0; i < candidate_vocabulary.size(); ++i) {
    const bool inserted = candidate_index.emplace(candidate_vocabulary[i], i).second;
    require(inserted, "backend ", backend_id, ": duplicate candidate token '",
            candidate_vocabulary[i], "'");
  }
}

std::string MaskedLmBackend::detokenize(std::span<const std::string> tokens) const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

ParsedRendered parse_rendered(const std::string& rendered) {
  const auto words = whitespace_tokenize(rendered);
  require(words.size() >= 3, "rendered probe too short: '", rendered, "'");
  require(words.front() == kClsToken && words.back() == kSepToken,
          "rendered probe must be delimited by ", kClsToken, " and ", kSepToken, ": '",
          rendered, "'");
  ParsedRendered parsed;
  parsed.words.assign(words.begin() + 1, words.end() - 1);
  std::size_t masks = 0;
  for (std::size_t i = 0; i < parsed.words.size(); ++i) {
    if (parsed.words[i] == kMaskToken) {
      parsed.mask_index = i;
      ++masks;
    }
  }
  require(masks == 1, "rendered probe must contain exactly one ", kMaskToken, ", found ",
          masks, ": '", rendered, "'");
  return parsed;
}

const std::unordered_map<std::string, RealModelInfo>& real_model_registry() {
  static const std::unordered_map<std::string, RealModelInfo> registry = {
      {"bert-base-uncased", {TokenizerFamily::word_piece, 110'000'000ull}},
      {"bert-large-uncased", {TokenizerFamily::word_piece, 340'000'000ull}},
      {"roberta-base", {TokenizerFamily::byte_pair, 125'000'000ull}},
      {"distilbert-base-uncased", {TokenizerFamily::byte_pair, 66'000'000ull}},
      {"albert-xxlarge-v2", {TokenizerFamily::sentence_piece, 223'000'000ull}},
  };
  return registry;
}

std::unique_ptr<MaskedLmBackend> make_backend(const BackendSpec& spec) {
  if (spec.backend_id == "mock") {
    require(!spec.config_path.empty(), "backend 'mock' needs a scores file (--backend-config)");
    return std::make_unique<MockBackend>(MockBackend::load(spec.config_path));
  }
  if (spec.backend_id == "toy") {
    require(!spec.config_path.empty(),
            "backend 'toy' needs a config or checkpoint file (--backend-config)");
    return std::make_unique<ToyMlmBackend>(ToyMlmBackend::from_file(spec.config_path));
  }
  if (real_model_registry().count(spec.backend_id) || spec.backend_id == "remote") {
    require(!spec.sidecar_url.empty(), "backend '", spec.backend_id,
            "' is served out of process; pass --sidecar-url (see tools/hf_sidecar.py)");
    const std::string expect_id = spec.backend_id == "remote" ? "" : spec.backend_id;
    return std::make_unique<RemoteBackend>(spec.sidecar_url, expect_id);
  }
  std::string known = "mock, toy, remote";
  for (const auto& [id, info] : real_model_registry()) known += ", " + id;
  fail("unknown backend id '", spec.backend_id, "' (known: ", known, ")");
}

}  // namespace cloze
