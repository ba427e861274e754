#include <gtest/gtest.h>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "cstts/language.hpp"
#include "cstts/unicode.hpp"
#include "cstts/voice.hpp"

using cstts::LangCode;
using cstts::Locale;
using cstts::PlanMode;
using cstts::UserPrefs;
using namespace cstts::literals;

namespace {

// Consecutive language-tagged segments with spans laid end to end.
class SegmentBuilder {
 public:
  SegmentBuilder& add(const std::string& text, LangCode lang, cstts::Script script = cstts::Script::latin) {
    const auto n = cstts::unicode::length(text);
    cstts::LangSegment s{{text, script, {cursor_, cursor_ + n}}, lang, {lang, 1.0, cstts::DetectionMethod::lexicon}};
    cursor_ += n;
    segments_.push_back(std::move(s));
    return *this;
  }
  SegmentBuilder& words(std::size_t n, LangCode lang) {
    std::string text;
    for (std::size_t i = 0; i < n; ++i) text += "word ";
    return add(text, lang);
  }
  const std::vector<cstts::LangSegment>& get() const { return segments_; }

 private:
  std::vector<cstts::LangSegment> segments_;
  std::size_t cursor_ = 0;
};

const cstts::VoiceCatalog& catalog() { return cstts::VoiceCatalog::builtin(); }

}  // namespace

TEST(DetermineLocale, Examples) {
  const UserPrefs prefs;
  EXPECT_EQ(cstts::determine_locale("hi"_lang, "", prefs).str(), "hi-IN");
  EXPECT_EQ(cstts::determine_locale("en"_lang, "", prefs).str(), "en-US");
  UserPrefs mx;
  mx.region_overrides.emplace("es"_lang, "MX");
  EXPECT_EQ(cstts::determine_locale("es"_lang, "", mx).str(), "es-MX");
  EXPECT_EQ(cstts::determine_locale("zh"_lang, "", prefs).str(), "zh-CN");
}

TEST(DetermineLocale, PrecedenceOrder) {
  UserPrefs prefs;
  prefs.primary_locale = Locale::parse("en-GB");
  EXPECT_EQ(cstts::determine_locale("en"_lang, "", prefs).str(), "en-GB");
  prefs.region_overrides.emplace("en"_lang, "IN");
  EXPECT_EQ(cstts::determine_locale("en"_lang, "", prefs).str(), "en-IN");
  try {
    cstts::determine_locale("sw"_lang, "", prefs);
    FAIL();
  } catch (const cstts::Error& e) {
    EXPECT_EQ(e.code(), cstts::ErrorCode::no_locale_rule);
  }
}

TEST(SelectVoice, Examples) {
  EXPECT_EQ(cstts::select_voice(Locale::parse("en-US"), catalog()).id, "en-US-Wavenet-B");

  const cstts::Voice male_anchor{"x", Locale::parse("en-US"), cstts::Gender::male, "Other", "google"};
  const cstts::VoiceCatalog es({{"es-f", Locale::parse("es-ES"), cstts::Gender::female, "Wavenet", "google"},
                                {"es-m", Locale::parse("es-ES"), cstts::Gender::male, "Wavenet", "google"}});
  EXPECT_EQ(cstts::select_voice(Locale::parse("es-ES"), es, male_anchor).id, "es-m");

  const cstts::VoiceCatalog one({{"only", Locale::parse("fr-CA"), cstts::Gender::female, "X", "google"}});
  EXPECT_EQ(cstts::select_voice(Locale::parse("fr-FR"), one).id, "only");
}

TEST(SelectVoice, ExactLocaleBeatsLanguageMatch) {
  EXPECT_EQ(cstts::select_voice(Locale::parse("es-US"), catalog()).id, "es-US-Wavenet-B");
  EXPECT_EQ(cstts::select_voice(Locale::parse("es-MX"), catalog()).id, "es-ES-Wavenet-B");
  try {
    cstts::select_voice(Locale::parse("sw-KE"), catalog());
    FAIL();
  } catch (const cstts::Error& e) {
    EXPECT_EQ(e.code(), cstts::ErrorCode::no_voice_for_language);
  }
}

TEST(SelectVoice, FamilyBreaksGenderTies) {
  const cstts::Voice anchor{"a", Locale::parse("en-US"), cstts::Gender::male, "Standard", "google"};
  EXPECT_EQ(cstts::select_voice(Locale::parse("te-IN"), catalog(), anchor).id, "te-IN-Standard-B");
  const cstts::Voice female{"a", Locale::parse("en-US"), cstts::Gender::female, "Wavenet", "google"};
  EXPECT_EQ(cstts::select_voice(Locale::parse("es-ES"), catalog(), female).id, "es-ES-Wavenet-C");
}

TEST(LoanwordCheck, Examples) {
  UserPrefs prefs;
  prefs.loanwords.emplace("paris", "en"_lang);
  prefs.loanwords.emplace("shukriya", "hi"_lang);
  EXPECT_EQ(cstts::loanword_check("Paris", prefs), "en"_lang);
  EXPECT_EQ(cstts::loanword_check("shukriya!", prefs), "hi"_lang);
  EXPECT_FALSE(cstts::loanword_check("London", prefs).has_value());
}

TEST(CountWords, SpacedAndUnspacedScripts) {
  EXPECT_EQ(cstts::count_words("Merci beaucoup "), 2u);
  EXPECT_EQ(cstts::count_words("  "), 0u);
  EXPECT_EQ(cstts::count_words("我来自美国。"), 5u);
  EXPECT_EQ(cstts::count_words("こんにちは、お元気ですか？"), 11u);
}

TEST(BuildVoicePlan, CaseOneTwoVoicesAndPause) {
  SegmentBuilder b;
  b.add("I'm from the United States. ", "en"_lang).add("Soy de los Estados Unidos.", "es"_lang);
  const auto plan = cstts::build_voice_plan(b.get(), catalog(), UserPrefs{});
  ASSERT_EQ(plan.entries.size(), 2u);
  EXPECT_EQ(plan.entries[0].voice.id, "en-US-Wavenet-B");
  EXPECT_EQ(plan.entries[1].voice.id, "es-ES-Wavenet-B");
  EXPECT_EQ(plan.entries[0].pause_before_ms, 0);
  EXPECT_EQ(plan.entries[1].pause_before_ms, 50);
  EXPECT_FALSE(plan.entries[1].lang_span);
  EXPECT_EQ(plan.anchor_lang, "en"_lang);
}

TEST(BuildVoicePlan, SingleSegment) {
  for (auto mode : {PlanMode::single_voice, PlanMode::multi_voice}) {
    UserPrefs prefs;
    prefs.mode = mode;
    SegmentBuilder b;
    b.add("Hola amigos", "es"_lang);
    const auto plan = cstts::build_voice_plan(b.get(), catalog(), prefs);
    ASSERT_EQ(plan.entries.size(), 1u);
    EXPECT_EQ(plan.entries[0].pause_before_ms, 0);
    EXPECT_EQ(plan.entries[0].voice.id, "es-ES-Wavenet-B");
  }
}

TEST(BuildVoicePlan, ShortForeignSpanKeepsAnchorVoice) {
  SegmentBuilder b;
  b.words(10, "en"_lang).words(2, "fr"_lang).words(5, "en"_lang);
  const auto plan = cstts::build_voice_plan(b.get(), catalog(), UserPrefs{});
  ASSERT_EQ(plan.entries.size(), 3u);
  for (const auto& e : plan.entries) EXPECT_EQ(e.voice.id, "en-US-Wavenet-B");
  EXPECT_FALSE(plan.entries[0].lang_span);
  EXPECT_TRUE(plan.entries[1].lang_span);
  EXPECT_FALSE(plan.entries[2].lang_span);
  EXPECT_EQ(plan.entries[1].locale.str(), "fr-FR");
  EXPECT_EQ(plan.entries[1].pause_before_ms, 50);
  EXPECT_EQ(plan.entries[2].pause_before_ms, 50);
}

TEST(BuildVoicePlan, SingleVoiceMode) {
  UserPrefs prefs;
  prefs.mode = PlanMode::single_voice;
  SegmentBuilder b;
  b.words(4, "en"_lang).words(6, "es"_lang).add("我来自美国。", "zh"_lang, cstts::Script::han);
  const auto plan = cstts::build_voice_plan(b.get(), catalog(), prefs);
  std::set<std::string> ids;
  for (const auto& e : plan.entries) ids.insert(e.voice.id);
  EXPECT_EQ(ids.size(), 1u);
  EXPECT_EQ(plan.anchor_lang, "es"_lang);
  EXPECT_TRUE(plan.entries[0].lang_span);
  EXPECT_FALSE(plan.entries[1].lang_span);
  EXPECT_TRUE(plan.entries[2].lang_span);
}

TEST(BuildVoicePlan, VoiceCapDemotesSmallestLanguage) {
  SegmentBuilder b;
  b.words(10, "en"_lang).words(6, "es"_lang).words(4, "fr"_lang);
  UserPrefs prefs;
  prefs.switch_threshold_words = 0;
  auto plan = cstts::build_voice_plan(b.get(), catalog(), prefs);
  EXPECT_EQ(plan.entries[1].voice.id, "es-ES-Wavenet-B");
  EXPECT_EQ(plan.entries[2].voice.id, "en-US-Wavenet-B");
  EXPECT_TRUE(plan.entries[2].lang_span);

  prefs.max_voices = 0;
  plan = cstts::build_voice_plan(b.get(), catalog(), prefs);
  EXPECT_EQ(plan.entries[2].voice.id, "fr-FR-Wavenet-B");
}

TEST(BuildVoicePlan, MissingVoiceIsAnError) {
  SegmentBuilder b;
  b.words(5, "en"_lang).words(5, "it"_lang);
  try {
    cstts::build_voice_plan(b.get(), catalog(), UserPrefs{});
    FAIL();
  } catch (const cstts::Error& e) {
    EXPECT_EQ(e.code(), cstts::ErrorCode::no_voice_for_language);
  }
  EXPECT_THROW(cstts::build_voice_plan({}, catalog(), UserPrefs{}), cstts::Error);
}

TEST(ApplySwitchThreshold, Examples) {
  SegmentBuilder b;
  b.words(8, "en"_lang).words(2, "fr"_lang).words(6, "es"_lang);
  UserPrefs native;
  native.switch_threshold_words = 0;
  native.max_voices = 0;
  const auto base = cstts::build_voice_plan(b.get(), catalog(), native);
  EXPECT_EQ(base.entries[1].voice.id, "fr-FR-Wavenet-B");
  EXPECT_EQ(base.entries[2].voice.id, "es-ES-Wavenet-B");

  UserPrefs three;
  three.switch_threshold_words = 3;
  const auto plan = cstts::apply_switch_threshold(base, three);
  EXPECT_EQ(plan.entries[1].voice.id, "en-US-Wavenet-B");
  EXPECT_TRUE(plan.entries[1].lang_span);
  EXPECT_EQ(plan.entries[2].voice.id, "es-ES-Wavenet-B");
  EXPECT_FALSE(plan.entries[2].lang_span);
}

TEST(BuildVoicePlan, ThresholdProperty) {
  const std::vector<LangCode> langs{"en"_lang, "es"_lang, "fr"_lang, "de"_lang, "hi"_lang, "ja"_lang};
  std::mt19937 rng(31);
  for (int threshold : {0, 1, 3, 5}) {
    for (int trial = 0; trial < 300; ++trial) {
      SegmentBuilder b;
      std::vector<std::size_t> counts;
      const int n = 1 + static_cast<int>(rng() % 6);
      for (int i = 0; i < n; ++i) {
        const std::size_t words = 1 + rng() % 8;
        counts.push_back(words);
        b.words(words, langs[rng() % langs.size()]);
      }
      UserPrefs prefs;
      prefs.switch_threshold_words = threshold;
      prefs.max_voices = 0;
      const auto plan = cstts::build_voice_plan(b.get(), catalog(), prefs);
      ASSERT_EQ(plan.entries.size(), counts.size());
      for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto& e = plan.entries[i];
        if (e.lang == plan.anchor_lang) continue;
        if (counts[i] <= static_cast<std::size_t>(threshold)) {
          ASSERT_EQ(e.voice.id, plan.anchor_voice.id);
          ASSERT_TRUE(e.lang_span);
        } else {
          ASSERT_NE(e.voice.id, plan.anchor_voice.id);
          ASSERT_EQ(e.voice.locale.language, e.lang.str());
        }
      }
    }
  }
}

TEST(BuildVoicePlan, Invariants) {
  const std::vector<LangCode> langs{"en"_lang, "es"_lang, "fr"_lang, "de"_lang, "zh"_lang, "ar"_lang};
  std::mt19937 rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    SegmentBuilder b;
    const int n = 1 + static_cast<int>(rng() % 7);
    for (int i = 0; i < n; ++i) b.words(1 + rng() % 6, langs[rng() % langs.size()]);
    UserPrefs prefs;
    prefs.boundary_pause_ms = static_cast<int>(rng() % 300);
    prefs.switch_threshold_words = static_cast<int>(rng() % 4);
    prefs.max_voices = static_cast<int>(rng() % 4);
    prefs.mode = rng() % 2 ? PlanMode::single_voice : PlanMode::multi_voice;

    const auto plan = cstts::build_voice_plan(b.get(), catalog(), prefs);
    ASSERT_EQ(plan.entries.size(), b.get().size());
    std::set<std::string> ids;
    for (std::size_t i = 0; i < plan.entries.size(); ++i) {
      const auto& e = plan.entries[i];
      ASSERT_EQ(e.segment.text, b.get()[i].segment.text);
      ids.insert(e.voice.id);
      if (i == 0) {
        ASSERT_EQ(e.pause_before_ms, 0);
      } else {
        const auto& prev = plan.entries[i - 1];
        const bool change = prev.lang != e.lang || prev.voice.id != e.voice.id;
        ASSERT_EQ(e.pause_before_ms, change ? prefs.boundary_pause_ms : 0);
      }
    }
    if (prefs.mode == PlanMode::single_voice) ASSERT_EQ(ids.size(), 1u);
    if (prefs.mode == PlanMode::multi_voice && prefs.max_voices > 0) {
      ASSERT_LE(ids.size(), static_cast<std::size_t>(prefs.max_voices));
    }
    ASSERT_EQ(cstts::build_voice_plan(b.get(), catalog(), prefs).entries.back().voice,
              plan.entries.back().voice);
  }
}

TEST(BuildVoicePlan, ThresholdZeroGivesNativeVoices) {
  SegmentBuilder b;
  b.words(3, "en"_lang).words(1, "es"_lang).add("我来自美国。", "zh"_lang, cstts::Script::han).words(2, "de"_lang);
  UserPrefs prefs;
  prefs.switch_threshold_words = 0;
  prefs.max_voices = 0;
  for (const auto& e : cstts::build_voice_plan(b.get(), catalog(), prefs).entries) {
    EXPECT_EQ(e.voice.locale.language, e.lang.str());
  }
}

TEST(UserPrefs, JsonRoundTripAndValidation) {
  UserPrefs p;
  p.latin_lang_hint = "es"_lang;
  p.mode = PlanMode::single_voice;
  p.region_overrides.emplace("es"_lang, "MX");
  p.loanwords.emplace("paris", "fr"_lang);
  p.boundary_pause_ms = 189;
  const auto again = UserPrefs::from_json(p.to_json());
  EXPECT_EQ(again.to_json(), p.to_json());

  const auto partial = UserPrefs::from_json(nlohmann::json::parse(R"({"switch_threshold_words": 5})"));
  EXPECT_EQ(partial.switch_threshold_words, 5);
  EXPECT_EQ(partial.boundary_pause_ms, 50);
  EXPECT_THROW(UserPrefs::from_json(nlohmann::json::parse(R"({"max_voices": -1})")), cstts::Error);
  EXPECT_THROW(UserPrefs::from_json(nlohmann::json::parse(R"({"mode": "chorus"})")), cstts::Error);
  EXPECT_THROW(UserPrefs::from_json(nlohmann::json::parse(R"({"boundary_pause_ms": "long"})")), cstts::Error);
}

TEST(VoiceCatalog, JsonRoundTrip) {
  const auto again = cstts::VoiceCatalog::from_json(catalog().to_json());
  EXPECT_EQ(again.voices(), catalog().voices());
  EXPECT_THROW(cstts::VoiceCatalog::from_json(nlohmann::json::parse(
                   R"([{"id": "a", "locale": "en-US", "gender": "male", "family": "f", "engine": "mock"},
                       {"id": "a", "locale": "en-GB", "gender": "male", "family": "f", "engine": "mock"}])")),
               cstts::Error);
  EXPECT_EQ(cstts::RegionMap::from_json(cstts::RegionMap::builtin().to_json()), cstts::RegionMap::builtin());
}

TEST(Locale, ParseValidates) {
  EXPECT_EQ(Locale::parse("zh-CN").region, "CN");
  EXPECT_EQ(Locale::parse("es-419").region, "419");
  EXPECT_THROW(Locale::parse("english"), cstts::Error);
  EXPECT_THROW(Locale::parse("EN-us"), cstts::Error);
}
