#pragma once

#include <memory>

#include "cloze/backend.hpp"

namespace cloze {

// Adapter for published masked-LM weights served out of process (see
// tools/hf_sidecar.py). All contract operations are forwarded over a small
// JSON/HTTP protocol; the descriptor (including the full candidate
// vocabulary) is fetched once at construction. The sidecar owns determinism
// for inference (eval mode, fixed seeds); this class owns wire validation.
class RemoteBackend : public MaskedLmBackend {
 public:
  // expect_backend_id, when non-empty, must match the id the sidecar serves.
  RemoteBackend(const std::string& base_url, const std::string& expect_backend_id);
  ~RemoteBackend() override;

  RemoteBackend(RemoteBackend&&) noexcept;
  RemoteBackend& operator=(RemoteBackend&&) noexcept;

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

 private:
  struct Http;  // hides the httplib client
  std::unique_ptr<Http> http_;
  BackendDescriptor desc_;
  std::uint64_t examples_seen_ = 0;
};

}  // namespace cloze
