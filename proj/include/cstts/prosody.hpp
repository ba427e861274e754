#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cstts/error.hpp"
#include "cstts/language.hpp"
#include "cstts/plan.hpp"
#include "cstts/unicode.hpp"

namespace cstts {

enum class SentimentCategory { exclamatory, interrogative, positive, negative, neutral };

inline constexpr SentimentCategory all_sentiment_categories[] = {
    SentimentCategory::exclamatory, SentimentCategory::interrogative, SentimentCategory::positive,
    SentimentCategory::negative, SentimentCategory::neutral};

inline std::string_view to_string(SentimentCategory c) {
  switch (c) {
    case SentimentCategory::exclamatory: return "exclamatory";
    case SentimentCategory::interrogative: return "interrogative";
    case SentimentCategory::positive: return "positive";
    case SentimentCategory::negative: return "negative";
    case SentimentCategory::neutral: return "neutral";
  }
  return "neutral";
}

inline SentimentCategory sentiment_from_string(std::string_view s) {
  for (auto c : all_sentiment_categories) {
    if (to_string(c) == s) return c;
  }
  throw Error(ErrorCode::config_error, "unknown sentiment category: " + std::string(s));
}

struct Sentiment {
  SentimentCategory category = SentimentCategory::neutral;
  double intensity = 0.0;  // [0, 1]; 0 whenever neutral

  friend bool operator==(const Sentiment&, const Sentiment&) = default;
};

struct ProsodyRule {
  double rate_coeff = 0.0;
  double pitch_coeff = 0.0;
  Emphasis emphasis = Emphasis::none;

  friend bool operator==(const ProsodyRule&, const ProsodyRule&) = default;
};

/// Sentiment category -> prosody coefficients (percent per unit intensity).
class ProsodyRules {
 public:
  explicit ProsodyRules(std::map<SentimentCategory, ProsodyRule> rules) : rules_(std::move(rules)) {}

  static const ProsodyRules& builtin() {
    static const ProsodyRules r({
        {SentimentCategory::exclamatory, {10.0, 8.0, Emphasis::moderate}},
        {SentimentCategory::interrogative, {0.0, 6.0, Emphasis::none}},
        {SentimentCategory::positive, {5.0, 4.0, Emphasis::none}},
        {SentimentCategory::negative, {-5.0, -4.0, Emphasis::none}},
        {SentimentCategory::neutral, {0.0, 0.0, Emphasis::none}},
    });
    return r;
  }

  ProsodyRule rule(SentimentCategory c) const {
    auto it = rules_.find(c);
    return it == rules_.end() ? ProsodyRule{} : it->second;
  }

  /// {category: {rate_coeff, pitch_coeff, emphasis}}; missing categories map to zero.
  static ProsodyRules from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::config_error, "prosody rules must be a JSON object");
    std::map<SentimentCategory, ProsodyRule> rules;
    try {
      for (const auto& [name, r] : j.items()) {
        rules[sentiment_from_string(name)] = {r.at("rate_coeff").get<double>(), r.at("pitch_coeff").get<double>(),
                                              emphasis_from_string(r.value("emphasis", "none"))};
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::config_error, std::string("bad prosody rule: ") + e.what());
    }
    return ProsodyRules(std::move(rules));
  }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [c, r] : rules_) {
      j[std::string(to_string(c))] = {{"rate_coeff", r.rate_coeff},
                                      {"pitch_coeff", r.pitch_coeff},
                                      {"emphasis", std::string(to_string(r.emphasis))}};
    }
    return j;
  }

  friend bool operator==(const ProsodyRules&, const ProsodyRules&) = default;

 private:
  std::map<SentimentCategory, ProsodyRule> rules_;
};

/// Small English polarity word lists. Other languages rely on punctuation cues.
struct PolarityLexicon {
  std::set<std::string> positive;
  std::set<std::string> negative;

  static const PolarityLexicon& builtin() {
    static const PolarityLexicon p{
        {"amazing", "awesome", "beautiful", "best", "delighted", "enjoy", "excellent", "fantastic",
         "glad", "good", "great", "happy", "love", "lovely", "nice", "perfect", "wonderful"},
        {"angry", "awful", "bad", "fail", "failed", "hate", "horrible", "poor", "sad", "sorry",
         "terrible", "unfortunately", "upset", "worst", "wrong"},
    };
    return p;
  }
};

namespace detail {

constexpr bool is_bang(char32_t c) { return c == U'!' || c == U'！'; }
constexpr bool is_question(char32_t c) { return c == U'?' || c == U'？' || c == U'؟'; }
constexpr bool is_closer(char32_t c) {
  return c == U'"' || c == U'\'' || c == U')' || c == U']' || c == U'}' || c == U'”' ||
         c == U'’' || c == U'»' || c == U'」' || c == U'』' || c == U'）';
}

}  // namespace detail

/// Punctuation-led sentiment: a terminal "!" or "?" decides the category,
/// otherwise the polarity word balance does.
inline Sentiment analyze_sentiment(std::string_view text,
                                   const PolarityLexicon& polarity = PolarityLexicon::builtin()) {
  const auto cps = unicode::decode(text);
  std::size_t end = cps.size();
  while (end > 0 && (unicode::is_space(cps[end - 1].value) || detail::is_closer(cps[end - 1].value))) --end;
  if (end > 0 && detail::is_bang(cps[end - 1].value)) {
    std::size_t bangs = 0;
    while (end > 0 && detail::is_bang(cps[end - 1].value)) {
      ++bangs;
      --end;
    }
    return {SentimentCategory::exclamatory, std::min(1.0, 0.5 + 0.25 * static_cast<double>(bangs - 1))};
  }
  if (end > 0 && detail::is_question(cps[end - 1].value)) return {SentimentCategory::interrogative, 0.5};

  std::size_t words = 0;
  long balance = 0;
  for (const auto& tok : unicode::split_whitespace(text)) {
    const auto key = normalize_token(tok.text);
    if (key.empty()) continue;
    ++words;
    if (polarity.positive.contains(key)) ++balance;
    if (polarity.negative.contains(key)) --balance;
  }
  if (balance == 0 || words == 0) return {};
  const double ratio = std::min(1.0, static_cast<double>(std::labs(balance)) / static_cast<double>(words));
  return {balance > 0 ? SentimentCategory::positive : SentimentCategory::negative, ratio};
}

/// Segment sentiment wins unless neutral, in which case the utterance-level
/// sentiment carries over. Percentages round half away from zero, then clamp.
inline Prosody adjust_prosody(const Sentiment& segment, const Sentiment& overall,
                              const ProsodyRules& rules = ProsodyRules::builtin()) {
  const Sentiment& effective = segment.category != SentimentCategory::neutral ? segment : overall;
  if (effective.category == SentimentCategory::neutral) return {};
  const auto rule = rules.rule(effective.category);
  auto pct = [&](double coeff) {
    const long v = std::lround(coeff * effective.intensity);
    return static_cast<int>(std::clamp<long>(v, Prosody::min_pct, Prosody::max_pct));
  };
  return {pct(rule.rate_coeff), pct(rule.pitch_coeff), rule.emphasis};
}

inline VoicePlan attach_prosody(VoicePlan plan, std::string_view input_text,
                                const ProsodyRules& rules = ProsodyRules::builtin(),
                                const PolarityLexicon& polarity = PolarityLexicon::builtin()) {
  const auto overall = analyze_sentiment(input_text, polarity);
  for (auto& e : plan.entries) {
    e.prosody = adjust_prosody(analyze_sentiment(e.segment.text, polarity), overall, rules);
  }
  return plan;
}

}  // namespace cstts
