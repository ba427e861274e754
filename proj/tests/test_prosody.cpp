#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "cstts/prosody.hpp"
#include "cstts/voice.hpp"

using cstts::Emphasis;
using cstts::Prosody;
using cstts::Sentiment;
using cstts::SentimentCategory;

namespace {

struct Row {
  SentimentCategory category;
  double rate;
  double pitch;
  Emphasis emphasis;
};

constexpr Row table[] = {
    {SentimentCategory::exclamatory, 10, 8, Emphasis::moderate},
    {SentimentCategory::interrogative, 0, 6, Emphasis::none},
    {SentimentCategory::positive, 5, 4, Emphasis::none},
    {SentimentCategory::negative, -5, -4, Emphasis::none},
    {SentimentCategory::neutral, 0, 0, Emphasis::none},
};

int round_half_away(double x) {
  const double r = std::floor(std::fabs(x) + 0.5);
  return static_cast<int>(x < 0 ? -r : r);
}

Prosody oracle(const Sentiment& s) {
  for (const auto& row : table) {
    if (row.category != s.category) continue;
    if (s.category == SentimentCategory::neutral) return {};
    auto pct = [&](double c) { return std::max(-50, std::min(50, round_half_away(c * s.intensity))); };
    return {pct(row.rate), pct(row.pitch), row.emphasis};
  }
  return {};
}

cstts::VoicePlan plan_of(const std::vector<std::string>& texts) {
  cstts::VoicePlan plan;
  std::size_t cursor = 0;
  for (const auto& t : texts) {
    cstts::VoicePlanEntry e;
    e.segment = {t, cstts::Script::latin, {cursor, cursor + t.size()}};
    cursor += t.size();
    plan.entries.push_back(e);
  }
  return plan;
}

}  // namespace

TEST(AnalyzeSentiment, Examples) {
  EXPECT_EQ(cstts::analyze_sentiment("What a great day!"), (Sentiment{SentimentCategory::exclamatory, 0.5}));
  EXPECT_EQ(cstts::analyze_sentiment(""), (Sentiment{}));
  EXPECT_EQ(cstts::analyze_sentiment("¿Puedes come here?"), (Sentiment{SentimentCategory::interrogative, 0.5}));
}

TEST(AnalyzeSentiment, PunctuationCues) {
  EXPECT_EQ(cstts::analyze_sentiment("No way!!!").intensity, 1.0);
  EXPECT_EQ(cstts::analyze_sentiment("No way!!").intensity, 0.75);
  EXPECT_EQ(cstts::analyze_sentiment("Stop!!!!!!").intensity, 1.0);
  EXPECT_EQ(cstts::analyze_sentiment("\"Really?\" ").category, SentimentCategory::interrogative);
  EXPECT_EQ(cstts::analyze_sentiment("你好吗？").category, SentimentCategory::interrogative);
  EXPECT_EQ(cstts::analyze_sentiment("كيف حالك؟").category, SentimentCategory::interrogative);
  EXPECT_EQ(cstts::analyze_sentiment("太好了！").category, SentimentCategory::exclamatory);
  EXPECT_EQ(cstts::analyze_sentiment("Is it? Fine.").category, SentimentCategory::neutral);
}

TEST(AnalyzeSentiment, LexicalPolarity) {
  EXPECT_EQ(cstts::analyze_sentiment("a wonderful day"), (Sentiment{SentimentCategory::positive, 1.0 / 3.0}));
  EXPECT_EQ(cstts::analyze_sentiment("Sad, awful news."), (Sentiment{SentimentCategory::negative, 2.0 / 3.0}));
  EXPECT_EQ(cstts::analyze_sentiment("good and bad"), (Sentiment{}));
  EXPECT_EQ(cstts::analyze_sentiment("I'm from the United States."), (Sentiment{}));
}

TEST(AdjustProsody, Examples) {
  const Sentiment neutral;
  EXPECT_EQ(cstts::adjust_prosody(neutral, neutral), (Prosody{}));
  EXPECT_EQ(cstts::adjust_prosody(neutral, {SentimentCategory::exclamatory, 0.5}),
            (Prosody{5, 4, Emphasis::moderate}));
  EXPECT_EQ(cstts::adjust_prosody({SentimentCategory::negative, 1.0}, {SentimentCategory::positive, 0.5}),
            (Prosody{-5, -4, Emphasis::none}));
}

TEST(AdjustProsody, MatchesRuleTableOracle) {
  for (const auto& row : table) {
    for (double intensity : {0.0, 0.5, 1.0}) {
      const Sentiment s{row.category, row.category == SentimentCategory::neutral ? 0.0 : intensity};
      EXPECT_EQ(cstts::adjust_prosody(s, {}), oracle(s)) << to_string(row.category) << " " << intensity;
    }
  }
}

TEST(AdjustProsody, RoundsHalfAwayFromZero) {
  EXPECT_EQ(cstts::adjust_prosody({SentimentCategory::positive, 0.5}, {}), (Prosody{3, 2, Emphasis::none}));
  EXPECT_EQ(cstts::adjust_prosody({SentimentCategory::negative, 0.5}, {}), (Prosody{-3, -2, Emphasis::none}));
}

TEST(AdjustProsody, ClampsLargeCoefficients) {
  const cstts::ProsodyRules rules({{SentimentCategory::exclamatory, {120.0, -90.0, Emphasis::strong}}});
  EXPECT_EQ(cstts::adjust_prosody({SentimentCategory::exclamatory, 1.0}, {}, rules),
            (Prosody{50, -50, Emphasis::strong}));
  EXPECT_EQ(cstts::adjust_prosody({SentimentCategory::positive, 1.0}, {}, rules), (Prosody{}));
}

TEST(AdjustProsody, MonotoneAndBounded) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto cat = cstts::all_sentiment_categories[rng() % 5];
    const auto overall_cat = cstts::all_sentiment_categories[rng() % 5];
    const Sentiment overall{overall_cat, overall_cat == SentimentCategory::neutral ? 0.0 : unit(rng)};
    double a = unit(rng), b = unit(rng);
    if (a > b) std::swap(a, b);
    const auto lo = cstts::adjust_prosody({cat, a}, overall);
    const auto hi = cstts::adjust_prosody({cat, b}, overall);
    ASSERT_LE(std::abs(lo.rate_pct), std::abs(hi.rate_pct));
    ASSERT_LE(std::abs(lo.pitch_pct), std::abs(hi.pitch_pct));
    for (const auto& p : {lo, hi}) {
      ASSERT_GE(p.rate_pct, Prosody::min_pct);
      ASSERT_LE(p.rate_pct, Prosody::max_pct);
      ASSERT_GE(p.pitch_pct, Prosody::min_pct);
      ASSERT_LE(p.pitch_pct, Prosody::max_pct);
    }
  }
}

TEST(AttachProsody, NeutralPlanStaysZero) {
  const auto plan = cstts::attach_prosody(plan_of({"I'm from the United States. ", "Soy de los Estados Unidos."}),
                                          "I'm from the United States. Soy de los Estados Unidos.");
  for (const auto& e : plan.entries) EXPECT_EQ(e.prosody, (Prosody{}));
}

TEST(AttachProsody, EntriesInheritUtteranceSentiment) {
  const auto plan = cstts::attach_prosody(plan_of({"Merci beaucoup ", "thank you very much"}),
                                          "Merci beaucoup thank you very much!");
  for (const auto& e : plan.entries) EXPECT_EQ(e.prosody, (Prosody{5, 4, Emphasis::moderate}));
}

TEST(AttachProsody, SegmentSentimentWins) {
  const auto plan = cstts::attach_prosody(plan_of({"Where are you? ", "I am here."}), "Where are you? I am here.");
  EXPECT_EQ(plan.entries[0].prosody, (Prosody{0, 3, Emphasis::none}));
  EXPECT_EQ(plan.entries[1].prosody, (Prosody{}));
}

TEST(ProsodyRules, JsonRoundTrip) {
  const auto& rules = cstts::ProsodyRules::builtin();
  EXPECT_EQ(cstts::ProsodyRules::from_json(rules.to_json()), rules);
  EXPECT_THROW(cstts::ProsodyRules::from_json(nlohmann::json::parse(R"({"happy": {"rate_coeff": 1, "pitch_coeff": 1}})")),
               cstts::Error);
  EXPECT_THROW(cstts::ProsodyRules::from_json(nlohmann::json::parse(R"({"positive": {"rate_coeff": 1}})")),
               cstts::Error);
}
