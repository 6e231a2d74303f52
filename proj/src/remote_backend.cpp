#include "cloze/remote_backend.hpp"

#include <httplib.h>

#include "cloze/error.hpp"
#include "cloze/jsonl.hpp"

namespace cloze {

struct RemoteBackend::Http {
  explicit Http(const std::string& base_url) : client(base_url.c_str()), url(base_url) {
    client.set_read_timeout(600, 0);  // training steps on large models are slow
    client.set_write_timeout(600, 0);
  }

  json get(const std::string& path) {
    auto res = client.Get(path.c_str());
    return check(path, res);
  }

  json post(const std::string& path, const json& body) {
    auto res = client.Post(path.c_str(), body.dump(), "application/json");
    return check(path, res);
  }

  json check(const std::string& path, const httplib::Result& res) {
    require(static_cast<bool>(res), "sidecar unreachable at ", url, path, " (",
            httplib::to_string(res.error()), ")");
    require(res->status == 200, "sidecar error ", res->status, " at ", url, path, ": ",
            res->body);
    try {
      return json::parse(res->body);
    } catch (const std::exception& e) {
      fail("sidecar returned malformed JSON at ", url, path, ": ", e.what());
    }
  }

  httplib::Client client;
  std::string url;
};

RemoteBackend::RemoteBackend(const std::string& base_url, const std::string& expect_backend_id)
    : http_(std::make_unique<Http>(base_url)) {
  const json j = http_->get("/descriptor");
  desc_.backend_id = j.at("backend_id").get<std::string>();
  desc_.tokenizer_family = tokenizer_family_from_string(j.at("tokenizer_family").get<std::string>());
  desc_.candidate_vocabulary = j.at("candidate_vocabulary").get<std::vector<std::string>>();
  desc_.max_sequence_length = j.at("max_sequence_length").get<std::size_t>();
  desc_.parameter_count = j.value("parameter_count", std::uint64_t{0});
  desc_.unknown_token = j.value("unknown_token", "");
  desc_.finalize();
  examples_seen_ = j.value("examples_seen", std::uint64_t{0});
  require(expect_backend_id.empty() || desc_.backend_id == expect_backend_id,
          "sidecar at ", base_url, " serves '", desc_.backend_id, "', expected '",
          expect_backend_id, "'");
}

RemoteBackend::~RemoteBackend() = default;
RemoteBackend::RemoteBackend(RemoteBackend&&) noexcept = default;
RemoteBackend& RemoteBackend::operator=(RemoteBackend&&) noexcept = default;

std::vector<std::string> RemoteBackend::tokenize(const std::string& text) const {
  const json j = http_->post("/tokenize", json{{"text", text}});
  return j.at("tokens").get<std::vector<std::string>>();
}

Tokenization RemoteBackend::tokenize_words(std::span<const std::string> words) const {
  const json j = http_->post("/tokenize_words",
                             json{{"words", std::vector<std::string>(words.begin(), words.end())}});
  Tokenization tok;
  tok.tokens = j.at("tokens").get<std::vector<std::string>>();
  tok.word_index = j.at("word_index").get<std::vector<int>>();
  require(tok.tokens.size() == tok.word_index.size(),
          "sidecar tokenize_words: tokens/word_index length mismatch");
  return tok;
}

MaskScores RemoteBackend::predict_masked(const RenderedProbe& probe) const {
  parse_rendered(probe.rendered);  // validate the single-mask contract before the wire call
  const json j = http_->post("/predict_masked",
                             json{{"rendered", probe.rendered}, {"probe_id", probe.probe_id}});
  MaskScores result;
  result.probe_id = probe.probe_id;
  result.scores = j.at("scores").get<std::vector<double>>();
  require(result.scores.size() == desc_.candidate_vocabulary.size(),
          "sidecar predict_masked: expected ", desc_.candidate_vocabulary.size(),
          " scores, got ", result.scores.size());
  return result;
}

double RemoteBackend::train_mlm_step(std::span<const std::string> batch,
                                     const MaskingConfig& masking) {
  require(!batch.empty(), "train_mlm_step: empty batch");
  const json j = http_->post("/train_step",
                             json{{"batch", std::vector<std::string>(batch.begin(), batch.end())},
                                  {"mask_fraction", masking.mask_fraction},
                                  {"seed", masking.seed}});
  examples_seen_ = j.at("examples_seen").get<std::uint64_t>();
  return j.at("loss").get<double>();
}

std::filesystem::path RemoteBackend::save_checkpoint(const std::filesystem::path& dir,
                                                     const std::string& tag) const {
  const json j = http_->post("/checkpoint/save", json{{"dir", dir.string()}, {"tag", tag}});
  return std::filesystem::path(j.at("path").get<std::string>());
}

void RemoteBackend::load_checkpoint(const std::filesystem::path& dir, const std::string& tag) {
  const json j = http_->post("/checkpoint/load", json{{"dir", dir.string()}, {"tag", tag}});
  examples_seen_ = j.value("examples_seen", examples_seen_);
}

}  // namespace cloze
