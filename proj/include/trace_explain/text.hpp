#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace trace_explain {

// ASCII case folding; byte offsets are preserved.
std::string fold(std::string_view s);

// Lower-cased, single-spaced, trimmed form used as a concept id.
std::string canonical_key(std::string_view surface);

std::string_view trim(std::string_view s);

// Splits on runs of ASCII whitespace.
std::vector<std::string> split_whitespace(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Alphanumeric test used for word boundaries. Bytes >= 0x80 (UTF-8
// continuation/lead bytes) count as word characters.
inline bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') ||
         (u >= 'A' && u <= 'Z') || u >= 0x80;
}

inline bool is_alpha(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z');
}

inline bool is_upper(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 'A' && u <= 'Z';
}

inline bool is_alnum(char c) {
  const auto u = static_cast<unsigned char>(c);
  return is_alpha(c) || (u >= '0' && u <= '9');
}

inline char to_lower(char c) {
  return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c;
}

// True when [begin, end) in `text` is delimited by non-word characters or
// the string edges.
bool at_word_boundary(std::string_view text, std::size_t begin,
                      std::size_t end);

// Stable 64-bit FNV-1a hash rendered as 16 lower-case hex digits.
std::string stable_hash(std::string_view s);

}  // namespace trace_explain
