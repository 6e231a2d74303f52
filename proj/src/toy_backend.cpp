#include "cloze/toy_backend.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>

#include "cloze/error.hpp"
#include "cloze/jsonl.hpp"
#include "cloze/rng.hpp"
#include "cloze/text.hpp"

namespace cloze {

namespace {

constexpr char kMagic[8] = {'C', 'L', 'Z', 'T', 'O', 'Y', '0', '1'};

void write_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
void write_f64(std::ostream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
double read_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  os.write(reinterpret_cast<const char*>(m.data()),
           static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
}
void read_matrix(std::istream& is, Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols) {
  m.resize(rows, cols);
  is.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
}
void write_vector(std::ostream& os, const Eigen::VectorXd& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(v.size())));
}
void read_vector(std::istream& is, Eigen::VectorXd& v, Eigen::Index size) {
  v.resize(size);
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(v.size())));
}

void fill_gaussian(Eigen::MatrixXd& m, std::mt19937_64& rng, double scale) {
  double* data = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) data[i] = gaussian(rng) * scale;
}

}  // namespace

ToyMlmBackend ToyMlmBackend::fit(const ToyConfig& config, std::span<const std::string> corpus) {
  require(config.max_vocab > kSpecials, "toy backend: max_vocab must exceed ", kSpecials);
  require(config.embedding_dim > 0 && config.hidden_dim > 0, "toy backend: zero-sized layers");

  std::map<std::string, std::uint64_t> counts;
  for (const auto& text : corpus) {
    for (const auto& word : whitespace_tokenize(text)) ++counts[word];
  }
  std::vector<std::pair<std::string, std::uint64_t>> by_freq(counts.begin(), counts.end());
  std::sort(by_freq.begin(), by_freq.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  ToyMlmBackend backend;
  backend.cfg_ = config;
  backend.vocab_ = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};
  for (const auto& [word, freq] : by_freq) {
    if (backend.vocab_.size() >= config.max_vocab) break;
    backend.vocab_.push_back(word);
  }
  require(backend.vocab_.size() > kSpecials, "toy backend: corpus produced an empty vocabulary");
  backend.init_parameters();
  backend.rebuild_descriptor();
  return backend;
}

void ToyMlmBackend::init_parameters() {
  const auto v = static_cast<Eigen::Index>(vocab_.size());
  const auto d = static_cast<Eigen::Index>(cfg_.embedding_dim);
  const auto h = static_cast<Eigen::Index>(cfg_.hidden_dim);
  const auto r = static_cast<Eigen::Index>(2 * cfg_.context_window + 1);

  std::mt19937_64 rng(cfg_.init_seed);
  embed_.resize(v, d);
  relpos_.resize(r, d);
  w1_.resize(h, d);
  w2_.resize(h, h);
  out_w_.resize(v, h);
  fill_gaussian(embed_, rng, 0.1);
  fill_gaussian(relpos_, rng, 0.1);
  fill_gaussian(w1_, rng, 0.1);
  fill_gaussian(w2_, rng, 0.1);
  fill_gaussian(out_w_, rng, 0.1);
  b1_ = Eigen::VectorXd::Zero(h);
  b2_ = Eigen::VectorXd::Zero(h);
  out_b_ = Eigen::VectorXd::Zero(v);
  examples_seen_ = 0;
}

void ToyMlmBackend::rebuild_descriptor() {
  vocab_index_.clear();
  for (std::size_t i = 0; i < vocab_.size(); ++i) vocab_index_[vocab_[i]] = i;

  desc_.backend_id = "toy";
  desc_.tokenizer_family = TokenizerFamily::word_level;
  desc_.unknown_token = "[UNK]";
  desc_.max_sequence_length = cfg_.max_sequence_length;
  desc_.candidate_vocabulary.assign(vocab_.begin() + kSpecials, vocab_.end());
  const std::size_t v = vocab_.size();
  const std::size_t d = cfg_.embedding_dim;
  const std::size_t h = cfg_.hidden_dim;
  desc_.parameter_count = v * d + (2 * cfg_.context_window + 1) * d + h * d + h + h * h + h +
                          v * h + v;
  desc_.finalize();
}

std::size_t ToyMlmBackend::token_id(const std::string& word) const {
  const auto it = vocab_index_.find(word);
  return it == vocab_index_.end() ? kUnk : it->second;
}

std::vector<std::string> ToyMlmBackend::tokenize(const std::string& text) const {
  std::vector<std::string> tokens;
  for (const auto& word : whitespace_tokenize(text)) tokens.push_back(vocab_[token_id(word)]);
  return tokens;
}

Tokenization ToyMlmBackend::tokenize_words(std::span<const std::string> words) const {
  Tokenization tok;
  tok.tokens.reserve(words.size());
  tok.word_index.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    tok.tokens.push_back(vocab_[token_id(words[i])]);
    tok.word_index.push_back(static_cast<int>(i));
  }
  return tok;
}

Eigen::VectorXd ToyMlmBackend::context_representation(const std::vector<std::size_t>& ids,
                                                      std::size_t target) const {
  const auto d = static_cast<Eigen::Index>(cfg_.embedding_dim);
  const long window = static_cast<long>(cfg_.context_window);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(d);
  std::size_t n = 0;
  for (std::size_t j = 0; j < ids.size(); ++j) {
    if (j == target) continue;
    long rel = static_cast<long>(j) - static_cast<long>(target);
    rel = std::clamp(rel, -window, window);
    r += embed_.row(static_cast<Eigen::Index>(ids[j])).transpose();
    r += relpos_.row(static_cast<Eigen::Index>(rel + window)).transpose();
    ++n;
  }
  if (n > 0) r /= static_cast<double>(n);
  return r;
}

Eigen::VectorXd ToyMlmBackend::logits_at(const std::vector<std::size_t>& ids,
                                         std::size_t target) const {
  const Eigen::VectorXd r = context_representation(ids, target);
  const Eigen::VectorXd z1 = (w1_ * r + b1_).array().tanh();
  const Eigen::VectorXd z2 = (w2_ * z1 + b2_).array().tanh();
  return out_w_ * z2 + out_b_;
}

MaskScores ToyMlmBackend::predict_masked(const RenderedProbe& probe) const {
  const ParsedRendered parsed = parse_rendered(probe.rendered);
  require(parsed.words.size() + 2 <= cfg_.max_sequence_length, "toy backend: probe '",
          probe.probe_id, "' exceeds max_sequence_length ", cfg_.max_sequence_length);

  std::vector<std::size_t> ids(parsed.words.size());
  for (std::size_t i = 0; i < parsed.words.size(); ++i) ids[i] = token_id(parsed.words[i]);
  ids[parsed.mask_index] = kMask;

  const Eigen::VectorXd logits = logits_at(ids, parsed.mask_index);
  MaskScores result;
  result.probe_id = probe.probe_id;
  result.scores.assign(logits.data() + kSpecials, logits.data() + logits.size());
  return result;
}

double ToyMlmBackend::train_mlm_step(std::span<const std::string> batch,
                                     const MaskingConfig& masking) {
  require(!batch.empty(), "train_mlm_step: empty batch");

  // The masking stream is derived from (seed, examples already seen), so a
  // resumed run replays the exact batches an uninterrupted run would see.
  std::mt19937_64 rng(mix_seed(masking.seed, examples_seen_));

  const auto d = static_cast<Eigen::Index>(cfg_.embedding_dim);
  const auto h = static_cast<Eigen::Index>(cfg_.hidden_dim);
  const auto v = static_cast<Eigen::Index>(vocab_.size());
  const long window = static_cast<long>(cfg_.context_window);

  Eigen::MatrixXd g_embed = Eigen::MatrixXd::Zero(v, d);
  Eigen::MatrixXd g_relpos = Eigen::MatrixXd::Zero(relpos_.rows(), d);
  Eigen::MatrixXd g_w1 = Eigen::MatrixXd::Zero(h, d);
  Eigen::VectorXd g_b1 = Eigen::VectorXd::Zero(h);
  Eigen::MatrixXd g_w2 = Eigen::MatrixXd::Zero(h, h);
  Eigen::VectorXd g_b2 = Eigen::VectorXd::Zero(h);
  Eigen::MatrixXd g_out_w = Eigen::MatrixXd::Zero(v, h);
  Eigen::VectorXd g_out_b = Eigen::VectorXd::Zero(v);

  double loss_sum = 0.0;
  std::size_t masked_total = 0;

  for (const auto& text : batch) {
    const auto words = whitespace_tokenize(text);
    if (words.empty()) continue;
    std::vector<std::size_t> ids(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) ids[i] = token_id(words[i]);

    std::vector<std::size_t> targets;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (uniform_real(rng) < masking.mask_fraction) targets.push_back(i);
    }
    if (targets.empty()) {
      targets.push_back(static_cast<std::size_t>(bounded_uniform(rng, ids.size())));
    }

    for (const std::size_t t : targets) {
      // forward
      const Eigen::VectorXd r = context_representation(ids, t);
      const Eigen::VectorXd a1 = w1_ * r + b1_;
      const Eigen::VectorXd z1 = a1.array().tanh();
      const Eigen::VectorXd a2 = w2_ * z1 + b2_;
      const Eigen::VectorXd z2 = a2.array().tanh();
      const Eigen::VectorXd logits = out_w_ * z2 + out_b_;

      const double mx = logits.maxCoeff();
      const Eigen::VectorXd ex = (logits.array() - mx).exp();
      const double z = ex.sum();
      const auto target_id = static_cast<Eigen::Index>(ids[t]);
      loss_sum += std::log(z) + mx - logits(target_id);
      ++masked_total;

      // backward
      Eigen::VectorXd dlogits = ex / z;
      dlogits(target_id) -= 1.0;
      g_out_w.noalias() += dlogits * z2.transpose();
      g_out_b += dlogits;
      Eigen::VectorXd dz2 = out_w_.transpose() * dlogits;
      Eigen::VectorXd da2 = dz2.array() * (1.0 - z2.array().square());
      g_w2.noalias() += da2 * z1.transpose();
      g_b2 += da2;
      Eigen::VectorXd dz1 = w2_.transpose() * da2;
      Eigen::VectorXd da1 = dz1.array() * (1.0 - z1.array().square());
      g_w1.noalias() += da1 * r.transpose();
      g_b1 += da1;
      Eigen::VectorXd dr = w1_.transpose() * da1;

      std::size_t n_ctx = ids.size() - 1;
      if (n_ctx > 0) {
        const Eigen::VectorXd dr_each = dr / static_cast<double>(n_ctx);
        for (std::size_t j = 0; j < ids.size(); ++j) {
          if (j == t) continue;
          long rel = std::clamp(static_cast<long>(j) - static_cast<long>(t), -window, window);
          g_embed.row(static_cast<Eigen::Index>(ids[j])) += dr_each.transpose();
          g_relpos.row(static_cast<Eigen::Index>(rel + window)) += dr_each.transpose();
        }
      }
    }
  }

  require(masked_total > 0, "train_mlm_step: batch contained no maskable tokens");

  const double scale = cfg_.learning_rate / static_cast<double>(masked_total);
  embed_ -= scale * g_embed;
  relpos_ -= scale * g_relpos;
  w1_ -= scale * g_w1;
  b1_ -= scale * g_b1;
  w2_ -= scale * g_w2;
  b2_ -= scale * g_b2;
  out_w_ -= scale * g_out_w;
  out_b_ -= scale * g_out_b;

  examples_seen_ += batch.size();
  return loss_sum / static_cast<double>(masked_total);
}

std::filesystem::path ToyMlmBackend::save_checkpoint(const std::filesystem::path& dir,
                                                     const std::string& tag) const {
  std::filesystem::create_directories(dir);
  const auto path = dir / (tag + ".toy.bin");
  save_checkpoint_file(path);
  return path;
}

void ToyMlmBackend::save_checkpoint_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open checkpoint for writing: ", path.string());
  out.write(kMagic, sizeof(kMagic));
  write_u64(out, vocab_.size());
  write_u64(out, cfg_.embedding_dim);
  write_u64(out, cfg_.hidden_dim);
  write_u64(out, cfg_.context_window);
  write_u64(out, cfg_.max_vocab);
  write_u64(out, cfg_.max_sequence_length);
  write_f64(out, cfg_.learning_rate);
  write_u64(out, cfg_.init_seed);
  write_u64(out, examples_seen_);
  for (const auto& word : vocab_) {
    write_u64(out, word.size());
    out.write(word.data(), static_cast<std::streamsize>(word.size()));
  }
  write_matrix(out, embed_);
  write_matrix(out, relpos_);
  write_matrix(out, w1_);
  write_vector(out, b1_);
  write_matrix(out, w2_);
  write_vector(out, b2_);
  write_matrix(out, out_w_);
  write_vector(out, out_b_);
  out.flush();
  require(out.good(), "checkpoint write failed: ", path.string());
}

void ToyMlmBackend::load_checkpoint(const std::filesystem::path& dir, const std::string& tag) {
  const auto path = dir / (tag + ".toy.bin");
  *this = load_checkpoint_file(path);
}

ToyMlmBackend ToyMlmBackend::load_checkpoint_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "checkpoint not found: ", path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  require(in.good() && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0,
          "corrupt checkpoint (bad magic): ", path.string());

  ToyMlmBackend backend;
  const std::uint64_t v = read_u64(in);
  backend.cfg_.embedding_dim = read_u64(in);
  backend.cfg_.hidden_dim = read_u64(in);
  backend.cfg_.context_window = read_u64(in);
  backend.cfg_.max_vocab = read_u64(in);
  backend.cfg_.max_sequence_length = read_u64(in);
  backend.cfg_.learning_rate = read_f64(in);
  backend.cfg_.init_seed = read_u64(in);
  backend.examples_seen_ = read_u64(in);
  require(in.good() && v > kSpecials && v <= (1ull << 32), "corrupt checkpoint (header): ",
          path.string());

  backend.vocab_.reserve(v);
  for (std::uint64_t i = 0; i < v; ++i) {
    const std::uint64_t len = read_u64(in);
    require(in.good() && len < (1ull << 20), "corrupt checkpoint (vocab): ", path.string());
    std::string word(len, '\0');
    in.read(word.data(), static_cast<std::streamsize>(len));
    backend.vocab_.push_back(std::move(word));
  }

  const auto vi = static_cast<Eigen::Index>(v);
  const auto d = static_cast<Eigen::Index>(backend.cfg_.embedding_dim);
  const auto h = static_cast<Eigen::Index>(backend.cfg_.hidden_dim);
  const auto r = static_cast<Eigen::Index>(2 * backend.cfg_.context_window + 1);
  read_matrix(in, backend.embed_, vi, d);
  read_matrix(in, backend.relpos_, r, d);
  read_matrix(in, backend.w1_, h, d);
  read_vector(in, backend.b1_, h);
  read_matrix(in, backend.w2_, h, h);
  read_vector(in, backend.b2_, h);
  read_matrix(in, backend.out_w_, vi, h);
  read_vector(in, backend.out_b_, vi);
  require(in.good(), "corrupt checkpoint (truncated weights): ", path.string());

  backend.rebuild_descriptor();
  return backend;
}

ToyMlmBackend ToyMlmBackend::from_file(const std::filesystem::path& path) {
  {
    std::ifstream probe(path, std::ios::binary);
    require(probe.good(), "toy backend file not found: ", path.string());
    char magic[8] = {};
    probe.read(magic, sizeof(magic));
    if (probe.gcount() == sizeof(magic) && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0) {
      return load_checkpoint_file(path);
    }
  }
  const json j = read_json_file(path);
  if (j.contains("checkpoint")) {
    return load_checkpoint_file(
        path.parent_path() / j.at("checkpoint").get<std::string>());
  }
  ToyConfig cfg;
  cfg.embedding_dim = j.value("embedding_dim", cfg.embedding_dim);
  cfg.hidden_dim = j.value("hidden_dim", cfg.hidden_dim);
  cfg.context_window = j.value("context_window", cfg.context_window);
  cfg.max_vocab = j.value("max_vocab", cfg.max_vocab);
  cfg.max_sequence_length = j.value("max_sequence_length", cfg.max_sequence_length);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.init_seed = j.value("init_seed", cfg.init_seed);

  std::vector<std::string> corpus;
  if (j.contains("vocab")) {
    corpus = j.at("vocab").get<std::vector<std::string>>();
  } else if (j.contains("corpus")) {
    const auto corpus_path = path.parent_path() / j.at("corpus").get<std::string>();
    read_jsonl(corpus_path, [&](const json& rec) {
      if (!rec.contains("narrative")) return;
      if (rec.value("split_tag", "train") != "train") return;
      corpus.push_back(rec.at("narrative").get<std::string>());
    });
  } else {
    fail("toy backend config needs one of: vocab, corpus, checkpoint (", path.string(), ")");
  }
  return fit(cfg, corpus);
}

}  // namespace cloze
