#include "cloze/text.hpp"

namespace cloze {

namespace {
bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string normalize_text(std::string_view raw) { return ascii_lower(trim(raw)); }

std::string sanitize_utf8(std::string_view raw, std::size_t* replaced_bytes) {
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(raw.size());
  std::size_t replaced = 0;
  std::size_t i = 0;
  const std::size_t n = raw.size();
  auto is_cont = [&](std::size_t j) {
    return j < n && (static_cast<unsigned char>(raw[j]) & 0xC0) == 0x80;
  };
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(raw[i]);
    std::size_t len = 0;
    if (c < 0x80) {
      len = 1;
    } else if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
      len = 2;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
    } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
      len = 4;
    }
    bool ok = len > 0;
    for (std::size_t k = 1; ok && k < len; ++k) ok = is_cont(i + k);
    // Reject overlong / surrogate / out-of-range encodings.
    if (ok && len == 3) {
      const unsigned char c1 = static_cast<unsigned char>(raw[i + 1]);
      if ((c == 0xE0 && c1 < 0xA0) || (c == 0xED && c1 > 0x9F)) ok = false;
    }
    if (ok && len == 4) {
      const unsigned char c1 = static_cast<unsigned char>(raw[i + 1]);
      if ((c == 0xF0 && c1 < 0x90) || (c == 0xF4 && c1 > 0x8F)) ok = false;
    }
    if (ok) {
      out.append(raw.substr(i, len));
      i += len;
    } else {
      out.append(kReplacement);
      ++replaced;
      ++i;
    }
  }
  if (replaced_bytes) *replaced_bytes = replaced;
  return out;
}

std::vector<std::string> whitespace_tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t b = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > b) out.emplace_back(text.substr(b, i - b));
  }
  return out;
}

std::vector<std::string> alnum_words(std::string_view text) {
  auto is_word_char = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
  };
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_char(text[i])) ++i;
    std::size_t b = i;
    while (i < text.size() && is_word_char(text[i])) ++i;
    if (i > b) out.emplace_back(text.substr(b, i - b));
  }
  return out;
}

std::string join_words(const std::vector<std::string>& words, char sep) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(sep);
    out += words[i];
  }
  return out;
}

}  // namespace cloze
