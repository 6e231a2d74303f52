#pragma once

#include <Eigen/Dense>

#include "cloze/backend.hpp"

namespace cloze {

struct ToyConfig {
  std::size_t embedding_dim = 32;
  std::size_t hidden_dim = 64;
  std::size_t context_window = 8;  // relative positions clipped to +-window
  std::size_t max_vocab = 8000;    // includes the 5 special tokens
  std::size_t max_sequence_length = 128;
  double learning_rate = 0.05;
  std::uint64_t init_seed = 7;
};

// Small trainable masked LM over a word-level vocabulary. The contextual
// representation of a masked position is the mean of token-plus-relative-
// position embeddings of the surrounding words, pushed through two tanh
// layers and projected onto the vocabulary. Each masked position is
// conditioned on the fully unmasked rest of the sentence. Inference has no
// stochastic layers; checkpoints restore weights bit-exactly (declared
// serialization tolerance: 0).
class ToyMlmBackend : public MaskedLmBackend {
 public:
  // Builds the vocabulary from the corpus (frequency-descending, ties
  // lexicographic, capped at max_vocab) and randomly initializes weights
  // from init_seed.
  static ToyMlmBackend fit(const ToyConfig& config, std::span<const std::string> corpus);

  // Accepts either a JSON config ({"embedding_dim": ..., "corpus": <jsonl>}
  // or {"vocab": [...]}, or {"checkpoint": <path>}) or a binary checkpoint
  // written by save_checkpoint.
  static ToyMlmBackend from_file(const std::filesystem::path& path);

  const BackendDescriptor& descriptor() const override { return desc_; }
  std::vector<std::string> tokenize(const std::string& text) const override;
  Tokenization tokenize_words(std::span<const std::string> words) const override;
  MaskScores predict_masked(const RenderedProbe& probe) const override;
  double train_mlm_step(std::span<const std::string> batch,
                        const MaskingConfig& masking) override;
  std::uint64_t examples_seen() const override { return examples_seen_; }
  bool supports_training() const override { return true; }
  std::filesystem::path save_checkpoint(const std::filesystem::path& dir,
                                        const std::string& tag) const override;
  void load_checkpoint(const std::filesystem::path& dir, const std::string& tag) override;
  bool read_safe_concurrent() const override { return true; }

  static ToyMlmBackend load_checkpoint_file(const std::filesystem::path& path);
  void save_checkpoint_file(const std::filesystem::path& path) const;

  const ToyConfig& config() const { return cfg_; }

 private:
  ToyMlmBackend() = default;
  void init_parameters();
  void rebuild_descriptor();
  std::size_t token_id(const std::string& word) const;
  Eigen::VectorXd context_representation(const std::vector<std::size_t>& ids,
                                         std::size_t target) const;
  Eigen::VectorXd logits_at(const std::vector<std::size_t>& ids, std::size_t target) const;

  static constexpr std::size_t kPad = 0, kUnk = 1, kCls = 2, kSep = 3, kMask = 4;
  static constexpr std::size_t kSpecials = 5;

  ToyConfig cfg_;
  std::vector<std::string> vocab_;  // specials first, then words
  std::unordered_map<std::string, std::size_t> vocab_index_;
  Eigen::MatrixXd embed_;    // V x d
  Eigen::MatrixXd relpos_;   // (2K+1) x d
  Eigen::MatrixXd w1_;       // h x d
  Eigen::VectorXd b1_;       // h
  Eigen::MatrixXd w2_;       // h x h
  Eigen::VectorXd b2_;       // h
  Eigen::MatrixXd out_w_;    // V x h
  Eigen::VectorXd out_b_;    // V
  std::uint64_t examples_seen_ = 0;
  BackendDescriptor desc_;
};

}  // namespace cloze
