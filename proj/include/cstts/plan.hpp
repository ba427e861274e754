#pragma once

#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cstts/error.hpp"
#include "cstts/language.hpp"
#include "cstts/script.hpp"

namespace cstts {

enum class Emphasis { none, moderate, strong };

inline std::string_view to_string(Emphasis e) {
  switch (e) {
    case Emphasis::none: return "none";
    case Emphasis::moderate: return "moderate";
    case Emphasis::strong: return "strong";
  }
  return "none";
}

inline Emphasis emphasis_from_string(std::string_view s) {
  if (s == "none") return Emphasis::none;
  if (s == "moderate") return Emphasis::moderate;
  if (s == "strong") return Emphasis::strong;
  throw Error(ErrorCode::config_error, "unknown emphasis: " + std::string(s));
}

/// Signed percent offsets from the engine default, clamped to [-50, 50].
struct Prosody {
  static constexpr int min_pct = -50;
  static constexpr int max_pct = 50;

  int rate_pct = 0;
  int pitch_pct = 0;
  Emphasis emphasis = Emphasis::none;

  bool is_zero() const { return rate_pct == 0 && pitch_pct == 0 && emphasis == Emphasis::none; }
  friend bool operator==(const Prosody&, const Prosody&) = default;
};

/// BCP-47 shaped language-region tag, e.g. "hi-IN".
struct Locale {
  std::string language;
  std::string region;

  static Locale parse(std::string_view tag) {
    const auto dash = tag.find('-');
    auto bad = [&] { return Error(ErrorCode::config_error, "malformed locale: '" + std::string(tag) + "'"); };
    if (dash == std::string_view::npos) throw bad();
    Locale l{std::string(tag.substr(0, dash)), std::string(tag.substr(dash + 1))};
    if (l.language.size() < 2 || l.language.size() > 3 || l.region.empty() || l.region.size() > 3) throw bad();
    for (char c : l.language) {
      if (!std::islower(static_cast<unsigned char>(c))) throw bad();
    }
    for (char c : l.region) {
      if (!std::isupper(static_cast<unsigned char>(c)) && !std::isdigit(static_cast<unsigned char>(c))) throw bad();
    }
    return l;
  }

  std::string str() const { return language + "-" + region; }
  friend bool operator==(const Locale&, const Locale&) = default;
};

enum class Gender { female, male, neutral };

inline std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::female: return "female";
    case Gender::male: return "male";
    case Gender::neutral: return "neutral";
  }
  return "neutral";
}

inline Gender gender_from_string(std::string_view s) {
  if (s == "female") return Gender::female;
  if (s == "male") return Gender::male;
  if (s == "neutral") return Gender::neutral;
  throw Error(ErrorCode::config_error, "unknown gender: " + std::string(s));
}

struct Voice {
  std::string id;
  Locale locale;
  Gender gender = Gender::neutral;
  std::string family;
  std::string engine;

  friend bool operator==(const Voice&, const Voice&) = default;
};

enum class PlanMode { single_voice, multi_voice };

inline std::string_view to_string(PlanMode m) {
  return m == PlanMode::single_voice ? "single_voice" : "multi_voice";
}

inline PlanMode plan_mode_from_string(std::string_view s) {
  if (s == "single_voice") return PlanMode::single_voice;
  if (s == "multi_voice") return PlanMode::multi_voice;
  throw Error(ErrorCode::invalid_argument, "unknown mode: " + std::string(s));
}

struct VoicePlanEntry {
  RawSegment segment;
  LangCode lang;
  Locale locale;
  Voice voice;
  // Foreign text rendered by a voice of another language (<lang> span).
  bool lang_span = false;
  Prosody prosody;
  int pause_before_ms = 0;
  std::size_t word_count = 0;
};

struct VoicePlan {
  std::vector<VoicePlanEntry> entries;
  LangCode anchor_lang;
  Locale anchor_locale;
  Voice anchor_voice;
  PlanMode mode = PlanMode::multi_voice;

  std::string text() const {
    std::string out;
    for (const auto& e : entries) out += e.segment.text;
    return out;
  }
};

}  // namespace cstts
