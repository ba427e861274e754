#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cstts::unicode {

inline constexpr char32_t replacement_char = U'�';

/// One decoded scalar plus the byte range it came from. Each maximal
/// ill-formed subsequence decodes to a single U+FFFD covering its bytes.
struct CodePoint {
  char32_t value;
  std::size_t offset;
  std::size_t length;
};

namespace detail {

// Sequence length for a lead byte, 0 if it cannot start a sequence.
constexpr std::size_t sequence_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if (lead >= 0xC2 && lead <= 0xDF) return 2;
  if (lead >= 0xE0 && lead <= 0xEF) return 3;
  if (lead >= 0xF0 && lead <= 0xF4) return 4;
  return 0;
}

// Allowed range of the byte after `lead`.
constexpr std::pair<unsigned char, unsigned char> second_byte_range(unsigned char lead) {
  switch (lead) {
    case 0xE0: return {0xA0, 0xBF};
    case 0xED: return {0x80, 0x9F};
    case 0xF0: return {0x90, 0xBF};
    case 0xF4: return {0x80, 0x8F};
    default: return {0x80, 0xBF};
  }
}

}  // namespace detail

inline std::vector<CodePoint> decode(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  const auto* bytes = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const unsigned char lead = bytes[i];
    const std::size_t len = detail::sequence_length(lead);
    if (len <= 1) {
      out.push_back({len == 1 ? char32_t{lead} : replacement_char, i, 1});
      ++i;
      continue;
    }
    std::size_t good = 1;
    char32_t cp = lead & (0x7F >> len);
    while (good < len && i + good < n) {
      const unsigned char b = bytes[i + good];
      const auto [lo, hi] = good == 1 ? detail::second_byte_range(lead) : std::pair<unsigned char, unsigned char>{0x80, 0xBF};
      if (b < lo || b > hi) break;
      cp = (cp << 6) | (b & 0x3F);
      ++good;
    }
    if (good == len) {
      out.push_back({cp, i, len});
      i += len;
    } else {
      out.push_back({replacement_char, i, good});
      i += good;
    }
  }
  return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string encode(const std::u32string& cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

inline std::size_t length(std::string_view text) { return decode(text).size(); }

/// Unicode White_Space property.
constexpr bool is_space(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

/// Simple lowercase mapping for the alphabetic blocks the lexicons use
/// (Basic Latin, Latin-1, Latin Extended-A, Greek, Cyrillic).
constexpr char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 0x20;
  if (c < 0x80) return c;
  if ((c >= 0xC0 && c <= 0xDE) && c != 0xD7) return c + 0x20;
  if (c >= 0x100 && c <= 0x137) return c | 1u;
  if (c >= 0x139 && c <= 0x148) return (c % 2 == 1) ? c + 1 : c;
  if (c >= 0x14A && c <= 0x177) return c | 1u;
  if (c == 0x178) return 0xFF;
  if (c >= 0x179 && c <= 0x17E) return (c % 2 == 1) ? c + 1 : c;
  if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 0x20;
  if (c >= 0x410 && c <= 0x42F) return c + 0x20;
  if (c >= 0x400 && c <= 0x40F) return c + 0x50;
  return c;
}

inline std::string lowercase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const auto& cp : decode(text)) append_utf8(out, to_lower(cp.value));
  return out;
}

/// Splits on Unicode whitespace. Each token records its byte range so the
/// caller can slice the original text without losing separators.
struct Token {
  std::string_view text;
  std::size_t begin;  // byte offset
  std::size_t end;    // byte offset, exclusive
};

inline std::vector<Token> split_whitespace(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t start = 0;
  bool in_token = false;
  for (const auto& cp : decode(text)) {
    if (is_space(cp.value)) {
      if (in_token) tokens.push_back({text.substr(start, cp.offset - start), start, cp.offset});
      in_token = false;
    } else if (!in_token) {
      start = cp.offset;
      in_token = true;
    }
  }
  if (in_token) tokens.push_back({text.substr(start), start, text.size()});
  return tokens;
}

inline std::string_view trim(std::string_view text) {
  auto cps = decode(text);
  std::size_t first = 0;
  while (first < cps.size() && is_space(cps[first].value)) ++first;
  if (first == cps.size()) return {};
  std::size_t last = cps.size();
  while (last > first && is_space(cps[last - 1].value)) --last;
  const std::size_t begin = cps[first].offset;
  const std::size_t end = cps[last - 1].offset + cps[last - 1].length;
  return text.substr(begin, end - begin);
}

}  // namespace cstts::unicode
