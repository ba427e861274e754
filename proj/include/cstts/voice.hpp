#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cstts/error.hpp"
#include "cstts/language.hpp"
#include "cstts/plan.hpp"
#include "cstts/script.hpp"
#include "cstts/unicode.hpp"

namespace cstts {

namespace detail {

inline nlohmann::json read_json_file(const std::string& path, std::string_view what) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + std::string(what) + ": " + path);
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::config_error, path + ": " + e.what());
  }
}

}  // namespace detail

class VoiceCatalog {
 public:
  VoiceCatalog() = default;

  explicit VoiceCatalog(std::vector<Voice> voices) : voices_(std::move(voices)) {
    std::set<std::string> ids;
    for (const auto& v : voices_) {
      if (v.id.empty()) throw Error(ErrorCode::config_error, "voice with empty id");
      if (!ids.insert(v.id).second) throw Error(ErrorCode::config_error, "duplicate voice id: " + v.id);
    }
  }

  /// Google-style voice names; every engine field is "google".
  static const VoiceCatalog& builtin() {
    static const VoiceCatalog catalog = [] {
      struct Row {
        const char* id;
        const char* locale;
        Gender gender;
        const char* family;
      };
      static constexpr Row rows[] = {
          {"en-US-Wavenet-B", "en-US", Gender::male, "Wavenet"},
          {"en-US-Wavenet-F", "en-US", Gender::female, "Wavenet"},
          {"es-ES-Wavenet-B", "es-ES", Gender::male, "Wavenet"},
          {"es-ES-Wavenet-C", "es-ES", Gender::female, "Wavenet"},
          {"es-US-Wavenet-B", "es-US", Gender::male, "Wavenet"},
          {"fr-FR-Wavenet-B", "fr-FR", Gender::male, "Wavenet"},
          {"fr-FR-Wavenet-A", "fr-FR", Gender::female, "Wavenet"},
          {"de-DE-Wavenet-B", "de-DE", Gender::male, "Wavenet"},
          {"de-DE-Wavenet-A", "de-DE", Gender::female, "Wavenet"},
          {"hi-IN-Wavenet-B", "hi-IN", Gender::male, "Wavenet"},
          {"hi-IN-Wavenet-A", "hi-IN", Gender::female, "Wavenet"},
          {"kn-IN-Wavenet-B", "kn-IN", Gender::male, "Wavenet"},
          {"kn-IN-Wavenet-A", "kn-IN", Gender::female, "Wavenet"},
          {"te-IN-Standard-B", "te-IN", Gender::male, "Standard"},
          {"te-IN-Standard-A", "te-IN", Gender::female, "Standard"},
          {"bn-IN-Wavenet-B", "bn-IN", Gender::male, "Wavenet"},
          {"bn-IN-Wavenet-A", "bn-IN", Gender::female, "Wavenet"},
          {"gu-IN-Wavenet-B", "gu-IN", Gender::male, "Wavenet"},
          {"gu-IN-Wavenet-A", "gu-IN", Gender::female, "Wavenet"},
          {"cmn-CN-Wavenet-B", "zh-CN", Gender::male, "Wavenet"},
          {"cmn-CN-Wavenet-A", "zh-CN", Gender::female, "Wavenet"},
          {"ja-JP-Wavenet-C", "ja-JP", Gender::male, "Wavenet"},
          {"ja-JP-Wavenet-B", "ja-JP", Gender::female, "Wavenet"},
          {"ar-XA-Wavenet-B", "ar-XA", Gender::male, "Wavenet"},
          {"ar-XA-Wavenet-A", "ar-XA", Gender::female, "Wavenet"},
          {"ru-RU-Wavenet-B", "ru-RU", Gender::male, "Wavenet"},
          {"ko-KR-Wavenet-C", "ko-KR", Gender::male, "Wavenet"},
          {"el-GR-Wavenet-A", "el-GR", Gender::female, "Wavenet"},
          {"th-TH-Standard-A", "th-TH", Gender::female, "Standard"},
          {"he-IL-Wavenet-B", "he-IL", Gender::male, "Wavenet"},
      };
      std::vector<Voice> voices;
      for (const auto& r : rows) voices.push_back({r.id, Locale::parse(r.locale), r.gender, r.family, "google"});
      return VoiceCatalog(std::move(voices));
    }();
    return catalog;
  }

  const std::vector<Voice>& voices() const { return voices_; }
  bool empty() const { return voices_.empty(); }

  const Voice* find(std::string_view id) const {
    for (const auto& v : voices_) {
      if (v.id == id) return &v;
    }
    return nullptr;
  }

  std::vector<const Voice*> by_locale(const Locale& locale) const {
    std::vector<const Voice*> out;
    for (const auto& v : voices_) {
      if (v.locale == locale) out.push_back(&v);
    }
    return out;
  }

  std::vector<const Voice*> by_language(std::string_view language) const {
    std::vector<const Voice*> out;
    for (const auto& v : voices_) {
      if (v.locale.language == language) out.push_back(&v);
    }
    return out;
  }

  /// JSON array of {id, locale, gender, family, engine}.
  static VoiceCatalog from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw Error(ErrorCode::config_error, "voice catalog must be a JSON array");
    std::vector<Voice> voices;
    try {
      for (const auto& v : j) {
        voices.push_back({v.at("id").get<std::string>(), Locale::parse(v.at("locale").get<std::string>()),
                          gender_from_string(v.value("gender", "neutral")), v.value("family", ""),
                          v.value("engine", "")});
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::config_error, std::string("bad voice entry: ") + e.what());
    }
    return VoiceCatalog(std::move(voices));
  }

  static VoiceCatalog from_file(const std::string& path) {
    return from_json(detail::read_json_file(path, "voice catalog"));
  }

  nlohmann::json to_json() const {
    auto j = nlohmann::json::array();
    for (const auto& v : voices_) {
      j.push_back({{"id", v.id},
                   {"locale", v.locale.str()},
                   {"gender", std::string(to_string(v.gender))},
                   {"family", v.family},
                   {"engine", v.engine}});
    }
    return j;
  }

  friend bool operator==(const VoiceCatalog&, const VoiceCatalog&) = default;

 private:
  std::vector<Voice> voices_;
};

/// Canonical region per language, used when no override applies.
class RegionMap {
 public:
  explicit RegionMap(std::map<LangCode, std::string> regions) : regions_(std::move(regions)) {}

  static const RegionMap& builtin() {
    static const RegionMap m({
        {"en"_lang, "US"}, {"es"_lang, "ES"}, {"hi"_lang, "IN"}, {"zh"_lang, "CN"},
        {"ja"_lang, "JP"}, {"de"_lang, "DE"}, {"fr"_lang, "FR"}, {"ar"_lang, "XA"},
        {"kn"_lang, "IN"}, {"te"_lang, "IN"}, {"bn"_lang, "IN"}, {"gu"_lang, "IN"},
        {"ru"_lang, "RU"}, {"ko"_lang, "KR"}, {"el"_lang, "GR"}, {"th"_lang, "TH"},
        {"he"_lang, "IL"}, {"it"_lang, "IT"}, {"pt"_lang, "BR"}, {"nl"_lang, "NL"},
    });
    return m;
  }

  std::optional<std::string> lookup(const LangCode& lang) const {
    auto it = regions_.find(lang);
    if (it == regions_.end()) return std::nullopt;
    return it->second;
  }

  static RegionMap from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::config_error, "region map must be a JSON object");
    std::map<LangCode, std::string> m;
    for (const auto& [code, region] : j.items()) m.emplace(LangCode::parse(code), region.get<std::string>());
    return RegionMap(std::move(m));
  }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [lang, region] : regions_) j[lang.str()] = region;
    return j;
  }

  friend bool operator==(const RegionMap&, const RegionMap&) = default;

 private:
  std::map<LangCode, std::string> regions_;
};

struct UserPrefs {
  std::optional<LangCode> latin_lang_hint;
  PlanMode mode = PlanMode::multi_voice;
  LangCode default_lang = "en"_lang;
  Locale primary_locale = {"en", "US"};
  int switch_threshold_words = 3;
  std::map<LangCode, std::string> region_overrides;
  std::map<std::string, LangCode> loanwords;  // keys normalized
  int boundary_pause_ms = 50;
  // Distinct voices allowed per utterance in multi_voice mode; 0 lifts the cap.
  int max_voices = 2;

  void validate() const {
    if (switch_threshold_words < 0) throw Error(ErrorCode::invalid_argument, "switch_threshold_words must be >= 0");
    if (boundary_pause_ms < 0) throw Error(ErrorCode::invalid_argument, "boundary_pause_ms must be >= 0");
    if (max_voices < 0) throw Error(ErrorCode::invalid_argument, "max_voices must be >= 0");
  }

  /// Missing fields keep their defaults.
  static UserPrefs from_json(const nlohmann::json& j, UserPrefs base) {
    if (!j.is_object()) throw Error(ErrorCode::config_error, "prefs must be a JSON object");
    UserPrefs p = std::move(base);
    try {
      if (j.contains("latin_lang_hint")) {
        const auto& h = j.at("latin_lang_hint");
        p.latin_lang_hint = h.is_null() ? std::nullopt : std::optional(LangCode::parse(h.get<std::string>()));
      }
      if (j.contains("mode")) p.mode = plan_mode_from_string(j.at("mode").get<std::string>());
      if (j.contains("default_lang")) p.default_lang = LangCode::parse(j.at("default_lang").get<std::string>());
      if (j.contains("primary_locale")) p.primary_locale = Locale::parse(j.at("primary_locale").get<std::string>());
      if (j.contains("switch_threshold_words")) p.switch_threshold_words = j.at("switch_threshold_words").get<int>();
      if (j.contains("region_overrides")) {
        p.region_overrides.clear();
        for (const auto& [code, region] : j.at("region_overrides").items()) {
          p.region_overrides.emplace(LangCode::parse(code), region.get<std::string>());
        }
      }
      if (j.contains("loanwords")) {
        p.loanwords.clear();
        for (const auto& [word, code] : j.at("loanwords").items()) {
          p.loanwords.emplace(normalize_token(word), LangCode::parse(code.get<std::string>()));
        }
      }
      if (j.contains("boundary_pause_ms")) p.boundary_pause_ms = j.at("boundary_pause_ms").get<int>();
      if (j.contains("max_voices")) p.max_voices = j.at("max_voices").get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::config_error, std::string("bad prefs: ") + e.what());
    }
    p.validate();
    return p;
  }

  static UserPrefs from_json(const nlohmann::json& j) { return from_json(j, UserPrefs{}); }

  static UserPrefs from_file(const std::string& path) { return from_json(detail::read_json_file(path, "prefs")); }

  nlohmann::json to_json() const {
    nlohmann::json regions = nlohmann::json::object();
    for (const auto& [l, r] : region_overrides) regions[l.str()] = r;
    nlohmann::json loans = nlohmann::json::object();
    for (const auto& [w, l] : loanwords) loans[w] = l.str();
    return {{"latin_lang_hint", latin_lang_hint ? nlohmann::json(latin_lang_hint->str()) : nlohmann::json(nullptr)},
            {"mode", std::string(to_string(mode))},
            {"default_lang", default_lang.str()},
            {"primary_locale", primary_locale.str()},
            {"switch_threshold_words", switch_threshold_words},
            {"region_overrides", regions},
            {"loanwords", loans},
            {"boundary_pause_ms", boundary_pause_ms},
            {"max_voices", max_voices}};
  }
};

/// Override > primary locale's language > canonical region map.
/// `context` is the full input; current rules do not consult it.
inline Locale determine_locale(const LangCode& lang, std::string_view context, const UserPrefs& prefs,
                               const RegionMap& regions = RegionMap::builtin()) {
  (void)context;
  if (auto it = prefs.region_overrides.find(lang); it != prefs.region_overrides.end()) {
    return {lang.str(), it->second};
  }
  if (prefs.primary_locale.language == lang.str()) return prefs.primary_locale;
  if (auto region = regions.lookup(lang)) return {lang.str(), *region};
  throw Error(ErrorCode::no_locale_rule, "no locale rule for language '" + lang.str() + "'");
}

/// Exact-locale voices beat same-language ones; within the candidates the
/// anchor's gender, then its family, then catalog order decide.
inline Voice select_voice(const Locale& locale, const VoiceCatalog& catalog,
                          const std::optional<Voice>& anchor = std::nullopt) {
  if (catalog.empty()) throw Error(ErrorCode::invalid_argument, "voice catalog is empty");
  auto candidates = catalog.by_locale(locale);
  if (candidates.empty()) candidates = catalog.by_language(locale.language);
  if (candidates.empty()) {
    throw Error(ErrorCode::no_voice_for_language, "no voice for language '" + locale.language + "'");
  }
  if (!anchor) return *candidates.front();
  const Voice* best = nullptr;
  int best_score = -1;
  for (const Voice* v : candidates) {
    const int score = (v->gender == anchor->gender ? 2 : 0) + (v->family == anchor->family ? 1 : 0);
    if (score > best_score) {
      best = v;
      best_score = score;
    }
  }
  return *best;
}

inline std::optional<LangCode> loanword_check(std::string_view token, const UserPrefs& prefs) {
  auto it = prefs.loanwords.find(normalize_token(token));
  if (it == prefs.loanwords.end()) return std::nullopt;
  return it->second;
}

/// Whitespace-delimited word count. Scripts written without spaces (Han,
/// Kana, Thai) count one word per character instead.
inline std::size_t count_words(std::string_view text, const ScriptTable& table = ScriptTable::builtin()) {
  std::size_t count = 0;
  for (const auto& tok : unicode::split_whitespace(text)) {
    std::size_t unspaced = 0;
    for (const auto& cp : unicode::decode(tok.text)) {
      const Script s = table.classify(cp.value);
      if (s == Script::han || is_kana(s) || s == Script::thai) ++unspaced;
    }
    count += std::max<std::size_t>(unspaced, 1);
  }
  return count;
}

/// The language covering the most input characters; ties go to the one seen first.
inline LangCode anchor_language(const std::vector<LangSegment>& segments) {
  if (segments.empty()) throw Error(ErrorCode::invalid_argument, "no segments");
  std::vector<std::pair<LangCode, std::size_t>> coverage;
  for (const auto& s : segments) {
    auto it = std::find_if(coverage.begin(), coverage.end(), [&](const auto& c) { return c.first == s.lang; });
    if (it == coverage.end()) coverage.emplace_back(s.lang, s.segment.span.size());
    else it->second += s.segment.span.size();
  }
  auto best = coverage.begin();
  for (auto it = coverage.begin(); it != coverage.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

namespace detail {

inline void assign_pauses(VoicePlan& plan, const UserPrefs& prefs) {
  for (std::size_t i = 0; i < plan.entries.size(); ++i) {
    auto& e = plan.entries[i];
    if (i == 0) {
      e.pause_before_ms = 0;
      continue;
    }
    const auto& prev = plan.entries[i - 1];
    const bool boundary = prev.lang != e.lang || prev.voice.id != e.voice.id;
    e.pause_before_ms = boundary ? prefs.boundary_pause_ms : 0;
  }
}

// Keeps at most max_voices distinct voices; surplus languages (least
// character coverage first) fall back to the anchor voice with a lang span.
inline void apply_voice_cap(VoicePlan& plan, const UserPrefs& prefs) {
  if (prefs.max_voices <= 0) return;
  std::vector<std::pair<LangCode, std::size_t>> native;
  for (const auto& e : plan.entries) {
    if (e.voice.id == plan.anchor_voice.id) continue;
    auto it = std::find_if(native.begin(), native.end(), [&](const auto& n) { return n.first == e.lang; });
    if (it == native.end()) native.emplace_back(e.lang, e.segment.span.size());
    else it->second += e.segment.span.size();
  }
  const std::size_t keep = static_cast<std::size_t>(prefs.max_voices) - 1;
  if (native.size() <= keep) return;
  std::stable_sort(native.begin(), native.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::set<LangCode> demoted;
  for (std::size_t i = keep; i < native.size(); ++i) demoted.insert(native[i].first);
  for (auto& e : plan.entries) {
    if (demoted.contains(e.lang)) {
      e.voice = plan.anchor_voice;
      e.lang_span = true;
    }
  }
}

}  // namespace detail

/// Foreign entries of at most `switch_threshold_words` words are spoken by the
/// anchor voice inside a lang span; longer ones keep their native voice.
inline VoicePlan apply_switch_threshold(VoicePlan plan, const UserPrefs& prefs) {
  for (auto& e : plan.entries) {
    if (e.lang == plan.anchor_lang) continue;
    if (e.word_count <= static_cast<std::size_t>(prefs.switch_threshold_words)) {
      e.voice = plan.anchor_voice;
      e.lang_span = true;
    }
  }
  detail::assign_pauses(plan, prefs);
  return plan;
}

inline VoicePlan build_voice_plan(const std::vector<LangSegment>& segments, const VoiceCatalog& catalog,
                                  const UserPrefs& prefs, const RegionMap& regions = RegionMap::builtin()) {
  if (segments.empty()) throw Error(ErrorCode::invalid_argument, "no segments to plan");
  prefs.validate();
  std::string context;
  for (const auto& s : segments) context += s.segment.text;

  VoicePlan plan;
  plan.mode = prefs.mode;
  plan.anchor_lang = anchor_language(segments);
  plan.anchor_locale = determine_locale(plan.anchor_lang, context, prefs, regions);
  plan.anchor_voice = select_voice(plan.anchor_locale, catalog);

  for (const auto& s : segments) {
    VoicePlanEntry e;
    e.segment = s.segment;
    e.lang = s.lang;
    e.locale = determine_locale(s.lang, context, prefs, regions);
    e.word_count = count_words(s.segment.text);
    const bool foreign = s.lang != plan.anchor_lang;
    if (prefs.mode == PlanMode::single_voice) {
      e.voice = plan.anchor_voice;
      e.lang_span = foreign;
    } else {
      e.voice = foreign ? select_voice(e.locale, catalog, plan.anchor_voice) : plan.anchor_voice;
      e.lang_span = foreign && e.voice.locale.language != s.lang.str();
    }
    plan.entries.push_back(std::move(e));
  }
  if (prefs.mode == PlanMode::multi_voice) {
    plan = apply_switch_threshold(std::move(plan), prefs);
    detail::apply_voice_cap(plan, prefs);
  }
  detail::assign_pauses(plan, prefs);
  return plan;
}

}  // namespace cstts
