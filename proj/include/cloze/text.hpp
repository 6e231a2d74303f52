#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cloze {

// Lower-cases (ASCII) and trims surrounding whitespace. This is the full
// extent of corpus pre-processing: no punctuation stripping, no spell
// correction. Idempotent.
std::string normalize_text(std::string_view raw);

std::string trim(std::string_view s);
std::string ascii_lower(std::string_view s);

// Replaces invalid UTF-8 byte sequences with U+FFFD and counts how many
// bytes were replaced.
std::string sanitize_utf8(std::string_view raw, std::size_t* replaced_bytes = nullptr);

// Splits on runs of whitespace; no empty tokens.
std::vector<std::string> whitespace_tokenize(std::string_view text);

// Splits on every character outside [a-z0-9]; no empty tokens. Input is
// expected to be lower-cased already.
std::vector<std::string> alnum_words(std::string_view text);

std::string join_words(const std::vector<std::string>& words, char sep = ' ');

}  // namespace cloze
