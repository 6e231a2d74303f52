#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace cloze {

enum class TokenizerFamily { word_piece, sentence_piece, byte_pair, word_level };

std::string to_string(TokenizerFamily family);
TokenizerFamily tokenizer_family_from_string(const std::string& s);

struct BackendDescriptor {
  std::string backend_id;
  TokenizerFamily tokenizer_family = TokenizerFamily::word_level;
  // Every ground truth is ranked against exactly this list; ordering is
  // fixed for the backend's lifetime.
  std::vector<std::string> candidate_vocabulary;
  std::size_t max_sequence_length = 512;
  std::uint64_t parameter_count = 0;
  std::string unknown_token;  // empty when the backend has no UNK convention

  // Derived lookup; rebuilt by finalize().
  std::unordered_map<std::string, std::size_t> candidate_index;

  void finalize();
  bool has_candidate(const std::string& token) const {
    return candidate_index.count(token) != 0;
  }
};

// Token sequence with per-token source-word alignment (-1 marks tokens that
// belong to no input word, e.g. specials a backend chooses to emit).
struct Tokenization {
  std::vector<std::string> tokens;
  std::vector<int> word_index;
};

struct RenderedProbe {
  std::string probe_id;
  std::string rendered;  // "[CLS] w0 ... [MASK] ... [SEP]"
};

// Scores aligned with BackendDescriptor::candidate_vocabulary.
struct MaskScores {
  std::string probe_id;
  std::vector<double> scores;
};

struct MaskingConfig {
  double mask_fraction = 0.15;
  std::uint64_t seed = 0;
};

// Contract every masked-LM implementation satisfies. Inference is
// deterministic (no stochastic layers); training steps are serialized by the
// caller unless read_safe_concurrent() says otherwise.
class MaskedLmBackend {
 public:
  virtual ~MaskedLmBackend() = default;

  virtual const BackendDescriptor& descriptor() const = 0;

  virtual std::vector<std::string> tokenize(const std::string& text) const = 0;
  virtual Tokenization tokenize_words(std::span<const std::string> words) const = 0;
  virtual std::string detokenize(std::span<const std::string> tokens) const;

  virtual MaskScores predict_masked(const RenderedProbe& probe) const = 0;

  // One gradient update on the batch; returns the mean masked-LM loss and
  // advances the seen-example counter by the batch size.
  virtual double train_mlm_step(std::span<const std::string> batch,
                                const MaskingConfig& masking) = 0;
  virtual std::uint64_t examples_seen() const = 0;
  virtual bool supports_training() const { return false; }

  // load(save(state)) restores a backend whose predict_masked outputs are
  // bit-identical (per-backend serialization tolerance is documented; the
  // shipped backends are exact). Returns the checkpoint handle (a file path).
  virtual std::filesystem::path save_checkpoint(const std::filesystem::path& dir,
                                                const std::string& tag) const = 0;
  virtual void load_checkpoint(const std::filesystem::path& dir, const std::string& tag) = 0;

  virtual bool read_safe_concurrent() const { return false; }
};

// Parsed form of a rendered probe: the word sequence with "[MASK]" at
// mask_index. Throws unless the string is "[CLS] ... [SEP]" with exactly one
// mask marker.
struct ParsedRendered {
  std::vector<std::string> words;
  std::size_t mask_index = 0;
};
ParsedRendered parse_rendered(const std::string& rendered);

inline constexpr const char* kClsToken = "[CLS]";
inline constexpr const char* kSepToken = "[SEP]";
inline constexpr const char* kMaskToken = "[MASK]";

// Backend selection. `backend_id` picks the implementation: "mock" and "toy"
// need config_path (a scores file / a toy config or checkpoint); the
// registered real-model ids and explicit "remote" need sidecar_url.
struct BackendSpec {
  std::string backend_id;
  std::filesystem::path config_path;
  std::string sidecar_url;
  std::uint64_t seed = 0;
};

struct RealModelInfo {
  TokenizerFamily family;
  std::uint64_t parameter_count;
};

// The published model ids this pipeline knows about, with tokenizer family
// and informational parameter counts.
const std::unordered_map<std::string, RealModelInfo>& real_model_registry();

std::unique_ptr<MaskedLmBackend> make_backend(const BackendSpec& spec);

}  // namespace cloze
