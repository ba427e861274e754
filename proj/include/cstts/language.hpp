#pragma once

#include <algorithm>
#include <array>
#include <compare>
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
#include "cstts/script.hpp"
#include "cstts/unicode.hpp"

namespace cstts {

namespace detail {

inline constexpr std::string_view iso639_1_codes[] = {
    "aa", "ab", "ae", "af", "ak", "am", "an", "ar", "as", "av", "ay", "az", "ba", "be", "bg",
    "bi", "bm", "bn", "bo", "br", "bs", "ca", "ce", "ch", "co", "cr", "cs", "cu", "cv",
    "cy", "da", "de", "dv", "dz", "ee", "el", "en", "eo", "es", "et", "eu", "fa", "ff", "fi",
    "fj", "fo", "fr", "fy", "ga", "gd", "gl", "gn", "gu", "gv", "ha", "he", "hi", "ho", "hr",
    "ht", "hu", "hy", "hz", "ia", "id", "ie", "ig", "ii", "ik", "io", "is", "it", "iu", "ja",
    "jv", "ka", "kg", "ki", "kj", "kk", "kl", "km", "kn", "ko", "kr", "ks", "ku", "kv", "kw",
    "ky", "la", "lb", "lg", "li", "ln", "lo", "lt", "lu", "lv", "mg", "mh", "mi", "mk", "ml",
    "mn", "mr", "ms", "mt", "my", "na", "nb", "nd", "ne", "ng", "nl", "nn", "no", "nr", "nv",
    "ny", "oc", "oj", "om", "or", "os", "pa", "pi", "pl", "ps", "pt", "qu", "rm", "rn", "ro",
    "ru", "rw", "sa", "sc", "sd", "se", "sg", "si", "sk", "sl", "sm", "sn", "so", "sq", "sr",
    "ss", "st", "su", "sv", "sw", "ta", "te", "tg", "th", "ti", "tk", "tl", "tn", "to", "tr",
    "ts", "tt", "tw", "ty", "ug", "uk", "ur", "uz", "ve", "vi", "vo", "wa", "wo", "xh", "yi",
    "yo", "za", "zh", "zu"};

}  // namespace detail

/// ISO 639-1 language code; construction validates against the bundled registry.
class LangCode {
 public:
  LangCode() = default;

  static bool is_registered(std::string_view code) {
    return std::find(std::begin(detail::iso639_1_codes), std::end(detail::iso639_1_codes), code) !=
           std::end(detail::iso639_1_codes);
  }

  static LangCode parse(std::string_view code) {
    if (code.size() != 2 || !is_registered(code)) {
      throw Error(ErrorCode::invalid_lang_code, "not an ISO 639-1 code: '" + std::string(code) + "'");
    }
    LangCode c;
    c.code_ = std::string(code);
    return c;
  }

  const std::string& str() const { return code_; }
  bool empty() const { return code_.empty(); }

  friend auto operator<=>(const LangCode&, const LangCode&) = default;
  friend bool operator==(const LangCode&, const LangCode&) = default;

 private:
  std::string code_;
};

inline namespace literals {
inline LangCode operator""_lang(const char* s, std::size_t n) {
  return LangCode::parse(std::string_view(s, n));
}
}  // namespace literals

enum class DetectionMethod { script_direct, lexicon, hint, fallback };

inline std::string_view to_string(DetectionMethod m) {
  switch (m) {
    case DetectionMethod::script_direct: return "script_direct";
    case DetectionMethod::lexicon: return "lexicon";
    case DetectionMethod::hint: return "hint";
    case DetectionMethod::fallback: return "fallback";
  }
  return "fallback";
}

struct Detection {
  LangCode lang;
  double confidence = 0.0;
  DetectionMethod method = DetectionMethod::fallback;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Lexicon confidence: margin m between the top two vote counts maps to m/(m+1).
constexpr double vote_confidence(std::size_t top, std::size_t second) {
  const double margin = static_cast<double>(top - second);
  return margin / (margin + 1.0);
}

/// Lowercased lookup key: leading/trailing punctuation removed, typographic
/// apostrophes folded to ASCII.
inline std::string normalize_token(std::string_view token) {
  auto cps = unicode::decode(token);
  auto is_edge_punct = [](char32_t c) {
    if (c == U'\'' || c == U'’') return true;
    return ScriptTable::builtin().classify(c) == Script::common && !(c >= U'0' && c <= U'9');
  };
  std::size_t first = 0;
  std::size_t last = cps.size();
  while (first < last && is_edge_punct(cps[first].value)) ++first;
  while (last > first && is_edge_punct(cps[last - 1].value)) --last;
  std::string out;
  for (std::size_t i = first; i < last; ++i) {
    char32_t c = cps[i].value == U'’' ? U'\'' : cps[i].value;
    unicode::append_utf8(out, unicode::to_lower(c));
  }
  return out;
}

/// Per-language function-word lists. A word may belong to several languages.
class LexiconSet {
 public:
  LexiconSet() = default;

  static const LexiconSet& builtin();

  void add(const LangCode& lang, std::string_view word) {
    auto key = normalize_token(word);
    if (!key.empty()) words_[lang].insert(std::move(key));
  }

  /// Union of both sets; `other` adds to (never removes from) this one.
  void merge(const LexiconSet& other) {
    for (const auto& [lang, words] : other.words_) words_[lang].insert(words.begin(), words.end());
  }

  /// Languages whose list contains the normalized key, in code order.
  std::vector<LangCode> languages_for(const std::string& key) const {
    std::vector<LangCode> out;
    for (const auto& [lang, words] : words_) {
      if (words.contains(key)) out.push_back(lang);
    }
    return out;
  }

  std::vector<LangCode> languages() const {
    std::vector<LangCode> out;
    for (const auto& [lang, _] : words_) out.push_back(lang);
    return out;
  }

  const std::set<std::string>* words(const LangCode& lang) const {
    auto it = words_.find(lang);
    return it == words_.end() ? nullptr : &it->second;
  }

  /// JSON object mapping language code to an array of words.
  static LexiconSet from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::config_error, "lexicon file must be a JSON object");
    LexiconSet set;
    for (const auto& [code, list] : j.items()) {
      const auto lang = LangCode::parse(code);
      if (!list.is_array()) throw Error(ErrorCode::config_error, "lexicon for " + code + " must be an array");
      for (const auto& w : list) set.add(lang, w.get<std::string>());
    }
    return set;
  }

  static LexiconSet from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open lexicon: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::config_error, path + ": " + e.what());
    }
    return from_json(j);
  }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [lang, words] : words_) j[lang.str()] = std::vector<std::string>(words.begin(), words.end());
    return j;
  }

  friend bool operator==(const LexiconSet&, const LexiconSet&) = default;

 private:
  std::map<LangCode, std::set<std::string>> words_;
};

namespace detail {

inline constexpr std::pair<std::string_view, std::string_view> default_lexicon_words[] = {
    {"en",
     "a about after all also am an and any are as at be because been before but by can can't "
     "could did do does don't everyone for from good had has have he hello her here him his how "
     "i i'm if in is it it's its just me more morning much my no not now of on one or our out "
     "please she so some than thank thanks that the their them then there these they this to "
     "today too up us very was we welcome well were what when where which who why will with "
     "would yes you your"},
    {"es",
     "a al algo amigo amigos aquí bien buenos cómo con cuando de del donde dónde día el ella "
     "ellos en es esta está estoy este esto gracias hay hola hoy la las le lo los más me mi "
     "mucho muy no nos nosotros para pero por porque puedes que qué se señor sí sin sobre somos "
     "son soy su también te tengo tu tú un una uno vamos y yo"},
    {"fr",
     "à au aujourd'hui aux avec beaucoup bien bonjour c'est ça ce cette comme comment dans de "
     "des du elle en est et être ici il ils j'ai je la le les leur mais merci moi mon ne nous "
     "on ou où oui par pas pour qu'il que qui sa se ses son suis sur toi ton très tu un une "
     "viens voilà vous y"},
    {"de",
     "aber als am auch auf aus bei bin bis bitte danke das dass dem den der des die dir du ein "
     "eine einen er es geht gibt gut guten habe haben hallo heute ich ihr im in ist ja mit "
     "morgen nach nicht noch nur oder schön sehr sie sind so tag über und uns von vor was wie "
     "willkommen wir wo zu zum zur"},
};

}  // namespace detail

inline const LexiconSet& LexiconSet::builtin() {
  static const LexiconSet set = [] {
    LexiconSet s;
    for (const auto& [code, words] : detail::default_lexicon_words) {
      const auto lang = LangCode::parse(code);
      for (const auto& tok : unicode::split_whitespace(words)) s.add(lang, tok.text);
    }
    return s;
  }();
  return set;
}

/// Canonical language for each non-Latin script.
class ScriptLanguageMap {
 public:
  explicit ScriptLanguageMap(std::map<Script, LangCode> map) : map_(std::move(map)) {}

  static const ScriptLanguageMap& builtin() {
    static const ScriptLanguageMap m({
        {Script::devanagari, "hi"_lang}, {Script::han, "zh"_lang},
        {Script::hiragana, "ja"_lang},   {Script::katakana, "ja"_lang},
        {Script::kannada, "kn"_lang},    {Script::telugu, "te"_lang},
        {Script::bengali, "bn"_lang},    {Script::gujarati, "gu"_lang},
        {Script::arabic, "ar"_lang},     {Script::cyrillic, "ru"_lang},
        {Script::hangul, "ko"_lang},     {Script::greek, "el"_lang},
        {Script::thai, "th"_lang},       {Script::hebrew, "he"_lang},
    });
    return m;
  }

  std::optional<LangCode> lookup(Script s) const {
    auto it = map_.find(s);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  static ScriptLanguageMap from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::config_error, "script language map must be an object");
    std::map<Script, LangCode> m;
    for (const auto& [name, code] : j.items()) {
      auto s = script_from_string(name);
      if (!s) throw Error(ErrorCode::config_error, "unknown script name: " + name);
      m.emplace(*s, LangCode::parse(code.get<std::string>()));
    }
    return ScriptLanguageMap(std::move(m));
  }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [s, lang] : map_) j[std::string(to_string(s))] = lang.str();
    return j;
  }

  friend bool operator==(const ScriptLanguageMap&, const ScriptLanguageMap&) = default;

 private:
  std::map<Script, LangCode> map_;
};

struct LidOptions {
  LangCode default_lang = "en"_lang;
  std::size_t min_span = 3;        // words
  std::size_t max_iterations = 4;  // masking passes
  // Normalized token -> pinned language (loanwords, names).
  std::map<std::string, LangCode> pins;
};

struct LangSegment {
  RawSegment segment;
  LangCode lang;
  Detection detection;
};

/// Deterministic stopword-vote identifier with iterative lexicon masking for
/// same-script language mixtures. Immutable after construction.
class LanguageIdentifier {
 public:
  explicit LanguageIdentifier(LexiconSet lexicons = LexiconSet::builtin(),
                              ScriptLanguageMap scripts = ScriptLanguageMap::builtin(),
                              LidOptions options = {})
      : lexicons_(std::move(lexicons)), scripts_(std::move(scripts)), options_(std::move(options)) {}

  const LidOptions& options() const { return options_; }
  const LexiconSet& lexicons() const { return lexicons_; }

  Detection detect_language(const RawSegment& segment,
                            const std::optional<LangCode>& hint = std::nullopt) const {
    if (segment.text.empty()) throw Error(ErrorCode::invalid_argument, "empty segment");
    if (auto direct = scripts_.lookup(segment.script)) {
      return {*direct, 1.0, DetectionMethod::script_direct};
    }
    if (hint) return {*hint, 1.0, DetectionMethod::hint};
    if (segment.script != Script::latin) {
      throw Error(ErrorCode::unknown_script,
                  "no canonical language for script " + std::string(to_string(segment.script)));
    }
    return detect_lexical(segment.text);
  }

  bool contains_multiple_languages(const RawSegment& segment) const {
    if (segment.script != Script::latin) return false;
    const auto words = analyze(segment.text);
    if (words.size() < options_.min_span) return false;
    std::vector<std::size_t> all(words.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto dominant = dominant_language(words, all);
    if (!dominant) return false;
    std::set<LangCode> others;
    for (const auto& w : words) others.insert(w.hits.begin(), w.hits.end());
    others.erase(*dominant);
    for (const auto& lang : others) {
      if (has_winning_window(words, lang, *dominant)) return true;
    }
    return false;
  }

  /// Throws DegenerateSplit when masking reveals no secondary language.
  std::vector<LangSegment> split_by_language_boundary(const RawSegment& segment) const {
    const auto words = analyze(segment.text);
    auto degenerate = [] {
      return Error(ErrorCode::degenerate_split, "segment does not split into several languages");
    };
    if (words.empty()) throw degenerate();

    std::vector<std::size_t> all(words.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto matrix = dominant_language(words, all);
    if (!matrix) throw degenerate();

    std::vector<std::optional<LangCode>> label(words.size());
    std::vector<bool> masked(words.size(), false);
    auto mask = [&](const LangCode& lang) {
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (!masked[i] && contains(words[i].hits, lang)) {
          masked[i] = true;
          label[i] = lang;
        }
      }
    };
    mask(*matrix);
    std::size_t accepted = 1;
    for (std::size_t pass = 1; pass < options_.max_iterations; ++pass) {
      std::vector<std::size_t> residue;
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (!masked[i] && !words[i].hits.empty()) residue.push_back(i);
      }
      const auto next = dominant_language(words, residue);
      if (!next || !has_winning_window(words, *next, *matrix)) break;
      mask(*next);
      ++accepted;
    }
    if (accepted < 2) throw degenerate();

    // Unvoted words follow the preceding labelled word (leading ones the first).
    const auto first_labelled = *std::find_if(label.begin(), label.end(), [](const auto& l) { return l.has_value(); });
    std::optional<LangCode> carry = first_labelled;
    for (auto& l : label) {
      if (l) carry = l;
      else l = carry;
    }

    struct Run {
      std::size_t first_word;
      std::size_t word_count;
      LangCode lang;
    };
    std::vector<Run> runs;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (!runs.empty() && runs.back().lang == *label[i]) {
        ++runs.back().word_count;
      } else {
        runs.push_back({i, 1, *label[i]});
      }
    }
    auto merge_equal_neighbours = [&] {
      std::vector<Run> out;
      for (const auto& r : runs) {
        if (!out.empty() && out.back().lang == r.lang) out.back().word_count += r.word_count;
        else out.push_back(r);
      }
      runs = std::move(out);
    };
    // A short island between two runs of the same language is noise.
    for (std::size_t i = 1; i + 1 < runs.size(); ++i) {
      if (runs[i].word_count < options_.min_span && runs[i - 1].lang == runs[i + 1].lang) {
        runs[i].lang = runs[i - 1].lang;
      }
    }
    merge_equal_neighbours();

    auto byte_begin = [&](std::size_t r) { return r == 0 ? std::size_t{0} : words[runs[r].first_word].begin; };
    auto byte_end = [&](std::size_t r) {
      return r + 1 < runs.size() ? words[runs[r + 1].first_word].begin : segment.text.size();
    };
    // Every emitted run must re-detect to its own label; fold any that do not
    // into a neighbour until that holds.
    bool changed = true;
    while (changed && runs.size() > 1) {
      changed = false;
      for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto text = std::string_view(segment.text).substr(byte_begin(r), byte_end(r) - byte_begin(r));
        if (detect_lexical(text).lang == runs[r].lang) continue;
        runs[r].lang = r == 0 ? runs[1].lang : runs[r - 1].lang;
        merge_equal_neighbours();
        changed = true;
        break;
      }
    }
    if (runs.size() < 2) throw degenerate();

    std::vector<LangSegment> out;
    std::size_t cp_cursor = segment.span.begin;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      RawSegment sub;
      sub.text = segment.text.substr(byte_begin(r), byte_end(r) - byte_begin(r));
      sub.script = segment.script;
      const std::size_t len = unicode::length(sub.text);
      sub.span = {cp_cursor, cp_cursor + len};
      cp_cursor += len;
      auto detection = detect_lexical(sub.text);
      out.push_back({std::move(sub), runs[r].lang, detection});
    }
    return out;
  }

  /// Language identification over a whole script segmentation: non-Latin
  /// segments map by script, Latin segments honour the hint or go through
  /// lexicon voting and, when mixed, masking-based splitting.
  std::vector<LangSegment> identify(const std::vector<RawSegment>& segments,
                                    const std::optional<LangCode>& latin_hint = std::nullopt) const {
    std::vector<LangSegment> out;
    for (const auto& seg : segments) {
      if (is_neutral(seg.script)) {
        const Detection d = latin_hint ? Detection{*latin_hint, 1.0, DetectionMethod::hint}
                                       : Detection{options_.default_lang, 0.0, DetectionMethod::fallback};
        out.push_back({seg, d.lang, d});
        continue;
      }
      const Detection d = detect_language(seg, latin_hint);
      if (seg.script == Script::latin && !latin_hint && contains_multiple_languages(seg)) {
        try {
          for (auto& sub : split_by_language_boundary(seg)) out.push_back(std::move(sub));
          continue;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::degenerate_split) throw;
        }
      }
      out.push_back({seg, d.lang, d});
    }
    return out;
  }

 private:
  struct Word {
    std::size_t begin;  // byte offset
    std::size_t end;
    std::vector<LangCode> hits;
  };

  static bool contains(const std::vector<LangCode>& v, const LangCode& l) {
    return std::find(v.begin(), v.end(), l) != v.end();
  }

  std::vector<Word> analyze(std::string_view text) const {
    std::vector<Word> words;
    for (const auto& tok : unicode::split_whitespace(text)) {
      const auto key = normalize_token(tok.text);
      Word w{tok.begin, tok.end, {}};
      if (!key.empty()) {
        if (auto pin = options_.pins.find(key); pin != options_.pins.end()) {
          w.hits.push_back(pin->second);
        } else {
          w.hits = lexicons_.languages_for(key);
        }
      }
      words.push_back(std::move(w));
    }
    return words;
  }

  // Most-voted language among `subset`; ties go to the default language when
  // it is among the leaders, otherwise to the leader voted earliest.
  std::optional<LangCode> dominant_language(const std::vector<Word>& words,
                                            const std::vector<std::size_t>& subset) const {
    std::map<LangCode, std::size_t> votes;
    std::map<LangCode, std::size_t> first_seen;
    for (std::size_t idx : subset) {
      for (const auto& l : words[idx].hits) {
        ++votes[l];
        first_seen.emplace(l, idx);
      }
    }
    if (votes.empty()) return std::nullopt;
    std::size_t best = 0;
    for (const auto& [_, v] : votes) best = std::max(best, v);
    if (votes.contains(options_.default_lang) && votes[options_.default_lang] == best) {
      return options_.default_lang;
    }
    std::optional<LangCode> pick;
    std::size_t pick_pos = 0;
    for (const auto& [l, v] : votes) {
      if (v == best && (!pick || first_seen[l] < pick_pos)) {
        pick = l;
        pick_pos = first_seen[l];
      }
    }
    return pick;
  }

  // Is there a window of at least min_span consecutive words in which
  // `challenger` has strictly more votes than `incumbent`?
  bool has_winning_window(const std::vector<Word>& words, const LangCode& challenger,
                          const LangCode& incumbent) const {
    const std::size_t m = std::max<std::size_t>(options_.min_span, 1);
    if (words.size() < m) return false;
    std::vector<long> prefix(words.size() + 1, 0);
    for (std::size_t i = 0; i < words.size(); ++i) {
      prefix[i + 1] = prefix[i] + (contains(words[i].hits, challenger) ? 1 : 0) -
                      (contains(words[i].hits, incumbent) ? 1 : 0);
    }
    long min_prefix = prefix[0];
    for (std::size_t j = m; j <= words.size(); ++j) {
      min_prefix = std::min(min_prefix, prefix[j - m]);
      if (prefix[j] - min_prefix > 0) return true;
    }
    return false;
  }

  Detection detect_lexical(std::string_view text) const {
    std::map<LangCode, std::size_t> votes;
    for (const auto& w : analyze(text)) {
      for (const auto& l : w.hits) ++votes[l];
    }
    std::size_t top = 0;
    std::size_t second = 0;
    std::optional<LangCode> leader;
    for (const auto& [l, v] : votes) {
      if (v > top) {
        second = top;
        top = v;
        leader = l;
      } else if (v > second) {
        second = v;
      }
    }
    if (!leader || top == second) return {options_.default_lang, 0.0, DetectionMethod::fallback};
    return {*leader, vote_confidence(top, second), DetectionMethod::lexicon};
  }

  LexiconSet lexicons_;
  ScriptLanguageMap scripts_;
  LidOptions options_;
};

}  // namespace cstts
