#pragma once

#include <unordered_map>

#include "cloze/backend.hpp"

namespace cloze {

// Deterministic backend driven by explicit per-probe score tables. It is the
// oracle substrate for evaluator tests: predict_masked reproduces the
// configured tables exactly, tokens absent from a table score default_score.
class MockBackend : public MaskedLmBackend {
 public:
  using ScoreTable = std::unordered_map<std::string, double>;

  MockBackend(BackendDescriptor descriptor, double default_score = 0.0, bool strict = true);

  // Structured file: {"backend_id", "candidate_vocabulary": [...],
  // "default_score", "max_sequence_length", "tables": {probe_id: {token: score}}}
  static MockBackend load(const std::filesystem::path& path);

  void set_table(const std::string& probe_id, ScoreTable table);

  const BackendDescriptor& descriptor() const override { return desc_; }
  std::vector<std::string> tokenize(const std::string& text) const override;
  Tokenization tokenize_words(std::span<const std::string> words) const override;
  MaskScores predict_masked(const RenderedProbe& probe) const override;
  double train_mlm_step(std::span<const std::string> batch,
                        const MaskingConfig& masking) override;
  std::uint64_t examples_seen() const override { return 0; }
  std::filesystem::path save_checkpoint(const std::filesystem::path& dir,
                                        const std::string& tag) const override;
  void load_checkpoint(const std::filesystem::path& dir, const std::string& tag) override;
  bool read_safe_concurrent() const override { return true; }

 private:
  BackendDescriptor desc_;
  std::unordered_map<std::string, ScoreTable> tables_;
  double default_score_ = 0.0;
  // strict: predicting a probe with no configured table is an error rather
  // than a silently flat score vector.
  bool strict_ = true;
};

}  // namespace cloze
