#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cstts/error.hpp"
#include "cstts/unicode.hpp"

namespace cstts {

enum class Script {
  latin,
  devanagari,
  kannada,
  telugu,
  bengali,
  gujarati,
  han,
  hiragana,
  katakana,
  arabic,
  cyrillic,
  greek,
  hangul,
  thai,
  hebrew,
  common,
  unknown,
};

inline constexpr std::array<std::pair<Script, std::string_view>, 17> script_names{{
    {Script::latin, "Latin"},       {Script::devanagari, "Devanagari"},
    {Script::kannada, "Kannada"},   {Script::telugu, "Telugu"},
    {Script::bengali, "Bengali"},   {Script::gujarati, "Gujarati"},
    {Script::han, "Han"},           {Script::hiragana, "Hiragana"},
    {Script::katakana, "Katakana"}, {Script::arabic, "Arabic"},
    {Script::cyrillic, "Cyrillic"}, {Script::greek, "Greek"},
    {Script::hangul, "Hangul"},     {Script::thai, "Thai"},
    {Script::hebrew, "Hebrew"},     {Script::common, "Common"},
    {Script::unknown, "Unknown"},
}};

inline std::string_view to_string(Script s) {
  for (const auto& [script, name] : script_names) {
    if (script == s) return name;
  }
  return "Unknown";
}

inline std::optional<Script> script_from_string(std::string_view name) {
  for (const auto& [script, n] : script_names) {
    if (n == name) return script;
  }
  return std::nullopt;
}

/// Common and Unknown characters never start a run of their own.
constexpr bool is_neutral(Script s) { return s == Script::common || s == Script::unknown; }

constexpr bool is_kana(Script s) { return s == Script::hiragana || s == Script::katakana; }

struct ScriptRange {
  char32_t first;
  char32_t last;  // inclusive
  Script script;

  friend bool operator==(const ScriptRange&, const ScriptRange&) = default;
};

namespace detail {

// Block-level map; anything not listed classifies as Unknown.
inline constexpr ScriptRange default_script_ranges[] = {
    {0x0000, 0x0040, Script::common},    {0x0041, 0x005A, Script::latin},
    {0x005B, 0x0060, Script::common},    {0x0061, 0x007A, Script::latin},
    {0x007B, 0x00A9, Script::common},    {0x00AA, 0x00AA, Script::latin},
    {0x00AB, 0x00B9, Script::common},    {0x00BA, 0x00BA, Script::latin},
    {0x00BB, 0x00BF, Script::common},    {0x00C0, 0x00D6, Script::latin},
    {0x00D7, 0x00D7, Script::common},    {0x00D8, 0x00F6, Script::latin},
    {0x00F7, 0x00F7, Script::common},    {0x00F8, 0x02AF, Script::latin},
    {0x02B0, 0x036F, Script::common},    {0x0370, 0x037D, Script::greek},
    {0x037E, 0x037E, Script::common},    {0x037F, 0x03FF, Script::greek},
    {0x0400, 0x052F, Script::cyrillic},  {0x0590, 0x05FF, Script::hebrew},
    {0x0600, 0x060B, Script::arabic},    {0x060C, 0x060C, Script::common},
    {0x060D, 0x061A, Script::arabic},    {0x061B, 0x061B, Script::common},
    {0x061C, 0x061E, Script::arabic},    {0x061F, 0x061F, Script::common},
    {0x0620, 0x06FF, Script::arabic},    {0x0750, 0x077F, Script::arabic},
    {0x08A0, 0x08FF, Script::arabic},    {0x0900, 0x0963, Script::devanagari},
    {0x0964, 0x0965, Script::common},    {0x0966, 0x097F, Script::devanagari},
    {0x0980, 0x09FF, Script::bengali},   {0x0A80, 0x0AFF, Script::gujarati},
    {0x0C00, 0x0C7F, Script::telugu},    {0x0C80, 0x0CFF, Script::kannada},
    {0x0E00, 0x0E7F, Script::thai},      {0x1100, 0x11FF, Script::hangul},
    {0x1680, 0x1680, Script::common},    {0x1AB0, 0x1AFF, Script::common},
    {0x1C80, 0x1C8F, Script::cyrillic},  {0x1DC0, 0x1DFF, Script::common},
    {0x1E00, 0x1EFF, Script::latin},     {0x1F00, 0x1FFF, Script::greek},
    {0x2000, 0x2BFF, Script::common},    {0x2C60, 0x2C7F, Script::latin},
    {0x2DE0, 0x2DFF, Script::cyrillic},  {0x2E00, 0x2E7F, Script::common},
    {0x2E80, 0x2FDF, Script::han},       {0x2FF0, 0x2FFF, Script::common},
    {0x3000, 0x3004, Script::common},    {0x3005, 0x3005, Script::han},
    {0x3006, 0x3006, Script::common},    {0x3007, 0x3007, Script::han},
    {0x3008, 0x3020, Script::common},    {0x3021, 0x3029, Script::han},
    {0x302A, 0x3037, Script::common},    {0x3038, 0x303B, Script::han},
    {0x303C, 0x303F, Script::common},    {0x3041, 0x3096, Script::hiragana},
    {0x3099, 0x309C, Script::common},    {0x309D, 0x309F, Script::hiragana},
    {0x30A0, 0x30A0, Script::common},    {0x30A1, 0x30FA, Script::katakana},
    {0x30FB, 0x30FC, Script::common},    {0x30FD, 0x30FF, Script::katakana},
    {0x3130, 0x318F, Script::hangul},    {0x31F0, 0x31FF, Script::katakana},
    {0x3400, 0x4DBF, Script::han},       {0x4E00, 0x9FFF, Script::han},
    {0xA640, 0xA69F, Script::cyrillic},  {0xA720, 0xA7FF, Script::latin},
    {0xA8E0, 0xA8FF, Script::devanagari}, {0xA960, 0xA97F, Script::hangul},
    {0xAB30, 0xAB6F, Script::latin},     {0xAC00, 0xD7AF, Script::hangul},
    {0xD7B0, 0xD7FF, Script::hangul},    {0xF900, 0xFAFF, Script::han},
    {0xFB1D, 0xFB4F, Script::hebrew},    {0xFB50, 0xFDFF, Script::arabic},
    {0xFE00, 0xFE6F, Script::common},    {0xFE70, 0xFEFE, Script::arabic},
    {0xFEFF, 0xFEFF, Script::common},    {0xFF00, 0xFF20, Script::common},
    {0xFF21, 0xFF3A, Script::latin},     {0xFF3B, 0xFF40, Script::common},
    {0xFF41, 0xFF5A, Script::latin},     {0xFF5B, 0xFF65, Script::common},
    {0xFF66, 0xFF6F, Script::katakana},  {0xFF70, 0xFF70, Script::common},
    {0xFF71, 0xFF9D, Script::katakana},  {0xFF9E, 0xFF9F, Script::common},
    {0xFFF0, 0xFFFF, Script::common},    {0x1F000, 0x1FAFF, Script::common},
    {0x20000, 0x2FA1F, Script::han},     {0xE0000, 0xE007F, Script::common},
};

}  // namespace detail

/// Sorted, non-overlapping code point ranges mapped to scripts.
class ScriptTable {
 public:
  explicit ScriptTable(std::vector<ScriptRange> ranges) : ranges_(std::move(ranges)) {
    std::sort(ranges_.begin(), ranges_.end(),
              [](const ScriptRange& a, const ScriptRange& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < ranges_.size(); ++i) {
      if (ranges_[i].first > ranges_[i].last) {
        throw Error(ErrorCode::config_error, "script range start exceeds end");
      }
      if (i > 0 && ranges_[i].first <= ranges_[i - 1].last) {
        throw Error(ErrorCode::config_error, "script ranges overlap");
      }
    }
  }

  static const ScriptTable& builtin() {
    static const ScriptTable table(
        {std::begin(detail::default_script_ranges), std::end(detail::default_script_ranges)});
    return table;
  }

  Script classify(char32_t ch) const {
    auto it = std::upper_bound(ranges_.begin(), ranges_.end(), ch,
                               [](char32_t c, const ScriptRange& r) { return c < r.first; });
    if (it == ranges_.begin()) return Script::unknown;
    --it;
    return ch <= it->last ? it->script : Script::unknown;
  }

  const std::vector<ScriptRange>& ranges() const { return ranges_; }

  /// Array of {start_codepoint, end_codepoint, script_name}.
  static ScriptTable from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw Error(ErrorCode::config_error, "script table must be a JSON array");
    std::vector<ScriptRange> ranges;
    for (const auto& item : j) {
      try {
        const auto name = item.at("script_name").get<std::string>();
        auto script = script_from_string(name);
        if (!script) throw Error(ErrorCode::config_error, "unknown script name: " + name);
        ranges.push_back({item.at("start_codepoint").get<char32_t>(),
                          item.at("end_codepoint").get<char32_t>(), *script});
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::config_error, std::string("bad script range: ") + e.what());
      }
    }
    return ScriptTable(std::move(ranges));
  }

  static ScriptTable from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open script table: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::config_error, path + ": " + e.what());
    }
    return from_json(j);
  }

  nlohmann::json to_json() const {
    auto j = nlohmann::json::array();
    for (const auto& r : ranges_) {
      j.push_back({{"start_codepoint", static_cast<std::uint32_t>(r.first)},
                   {"end_codepoint", static_cast<std::uint32_t>(r.last)},
                   {"script_name", std::string(to_string(r.script))}});
    }
    return j;
  }

 private:
  std::vector<ScriptRange> ranges_;
};

inline Script classify_char(char32_t ch, const ScriptTable& table = ScriptTable::builtin()) {
  return table.classify(ch);
}

/// Half-open interval of code point indices into the original input.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const Span&, const Span&) = default;
};

struct RawSegment {
  std::string text;
  Script script = Script::common;
  Span span;

  friend bool operator==(const RawSegment&, const RawSegment&) = default;
};

struct SegmenterOptions {
  // Merge Hiragana/Katakana runs, and Han runs touching them with no
  // whitespace in between, into one Japanese segment.
  bool coalesce_japanese = true;
};

namespace detail {

struct Run {
  std::size_t begin;       // code point index
  std::size_t end;         // exclusive
  Script script;
  bool tail_has_space;     // whitespace among the neutral characters closing the run
  bool has_hiragana;
  bool has_katakana;
};

inline Script japanese_label(const Run& r) {
  if (r.has_hiragana) return Script::hiragana;
  if (r.has_katakana) return Script::katakana;
  return r.script;
}

inline std::vector<Run> coalesce_japanese(const std::vector<Run>& runs) {
  std::vector<Run> merged;
  Script last_member = Script::unknown;
  for (const auto& r : runs) {
    if (!merged.empty()) {
      Run& g = merged.back();
      const bool kana_pair = is_kana(last_member) && is_kana(r.script);
      const bool han_kana = ((last_member == Script::han && is_kana(r.script)) ||
                             (is_kana(last_member) && r.script == Script::han)) &&
                            !g.tail_has_space;
      if (kana_pair || han_kana) {
        g.end = r.end;
        g.tail_has_space = r.tail_has_space;
        g.has_hiragana = g.has_hiragana || r.has_hiragana;
        g.has_katakana = g.has_katakana || r.has_katakana;
        g.script = japanese_label(g);
        last_member = r.script;
        continue;
      }
    }
    merged.push_back(r);
    merged.back().script = japanese_label(r);
    last_member = r.script;
  }
  // Groups left side by side with the same label (split only by a spaced
  // Han boundary) are one segment.
  std::vector<Run> out;
  for (const auto& g : merged) {
    if (!out.empty() && out.back().script == g.script) {
      out.back().end = g.end;
      out.back().tail_has_space = g.tail_has_space;
      out.back().has_hiragana = out.back().has_hiragana || g.has_hiragana;
      out.back().has_katakana = out.back().has_katakana || g.has_katakana;
      continue;
    }
    out.push_back(g);
  }
  return out;
}

}  // namespace detail

/// Splits text into maximal same-script runs. Neutral characters (Common,
/// Unknown) join the preceding run, or the following one at the start of
/// input. The concatenated segment texts always equal `text`.
inline std::vector<RawSegment> split_by_script(std::string_view text,
                                               const ScriptTable& table = ScriptTable::builtin(),
                                               const SegmenterOptions& options = {}) {
  std::vector<RawSegment> segments;
  if (text.empty()) return segments;
  const auto cps = unicode::decode(text);

  std::vector<detail::Run> runs;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const Script s = table.classify(cps[i].value);
    if (is_neutral(s) || (!runs.empty() && runs.back().script == s)) continue;
    // New run; the previous one ends right here.
    if (!runs.empty()) runs.back().end = i;
    runs.push_back({runs.empty() ? 0 : i, 0, s, false, s == Script::hiragana,
                    s == Script::katakana});
  }
  if (runs.empty()) {
    segments.push_back({std::string(text), Script::common, {0, cps.size()}});
    return segments;
  }
  runs.back().end = cps.size();

  // Whitespace among the neutral characters between a run and its successor.
  for (auto& r : runs) {
    std::size_t k = r.end;
    bool space = false;
    while (k > r.begin && is_neutral(table.classify(cps[k - 1].value))) {
      if (unicode::is_space(cps[k - 1].value)) space = true;
      --k;
    }
    r.tail_has_space = space;
  }
  if (options.coalesce_japanese) runs = detail::coalesce_japanese(runs);

  segments.reserve(runs.size());
  for (const auto& r : runs) {
    const std::size_t byte_begin = cps[r.begin].offset;
    const std::size_t byte_end =
        r.end < cps.size() ? cps[r.end].offset : text.size();
    segments.push_back(
        {std::string(text.substr(byte_begin, byte_end - byte_begin)), r.script, {r.begin, r.end}});
  }
  return segments;
}

}  // namespace cstts
