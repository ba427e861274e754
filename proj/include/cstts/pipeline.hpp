#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cstts/cache.hpp"
#include "cstts/engine.hpp"
#include "cstts/error.hpp"
#include "cstts/language.hpp"
#include "cstts/plan.hpp"
#include "cstts/prosody.hpp"
#include "cstts/script.hpp"
#include "cstts/ssml.hpp"
#include "cstts/synth.hpp"
#include "cstts/unicode.hpp"
#include "cstts/voice.hpp"

namespace cstts {

/// Static resources shared by every run; immutable once a Pipeline owns it.
struct PipelineConfig {
  ScriptTable scripts = ScriptTable::builtin();
  SegmenterOptions segmenter;
  LexiconSet lexicons = LexiconSet::builtin();
  ScriptLanguageMap script_languages = ScriptLanguageMap::builtin();
  std::size_t min_span = 3;
  VoiceCatalog catalog = VoiceCatalog::builtin();
  RegionMap regions = RegionMap::builtin();
  ProsodyRules prosody_rules = ProsodyRules::builtin();
  PolarityLexicon polarity = PolarityLexicon::builtin();
  SsmlDialect dialect = SsmlDialect::builtin(DialectName::generic);
  SynthOptions synth;
};

struct StageTiming {
  std::string stage;
  double ms = 0;
};

struct PlanResult {
  std::vector<RawSegment> segments;
  std::vector<LangSegment> languages;
  VoicePlan plan;  // prosody attached
  std::vector<StageTiming> timings;
};

struct PipelineResult {
  std::vector<RawSegment> segments;
  std::vector<LangSegment> languages;
  VoicePlan plan;
  std::optional<SsmlDocument> ssml;
  AudioClip audio;
  std::size_t engine_requests = 0;
  std::size_t cache_hits = 0;
  std::vector<StageTiming> timings;
};

namespace detail {

/// Times `f` and tags any escaping Error with the stage name.
template <typename F>
auto run_stage(std::vector<StageTiming>& timings, const char* name, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto out = f();
    timings.push_back({name, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count()});
    return out;
  } catch (Error& e) {
    if (e.stage().empty()) e.set_stage(name);
    throw;
  }
}

}  // namespace detail

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config = {}) : config_(std::move(config)) { config_.dialect.validate(); }

  const PipelineConfig& config() const { return config_; }

  LanguageIdentifier identifier(const UserPrefs& prefs) const {
    LidOptions lid;
    lid.default_lang = prefs.default_lang;
    lid.min_span = config_.min_span;
    lid.pins = prefs.loanwords;
    return LanguageIdentifier(config_.lexicons, config_.script_languages, std::move(lid));
  }

  /// Segment, identify, voice, and annotate prosody.
  PlanResult plan(std::string_view text, const UserPrefs& prefs) const {
    if (unicode::trim(text).empty()) throw Error(ErrorCode::empty_input, "input text is empty", "input");
    PlanResult r;
    r.segments = detail::run_stage(r.timings, "segment", [&] { return split_by_script(text, config_.scripts, config_.segmenter); });
    r.languages = detail::run_stage(r.timings, "identify", [&] { return identifier(prefs).identify(r.segments, prefs.latin_lang_hint); });
    r.plan = detail::run_stage(r.timings, "plan", [&] { return build_voice_plan(r.languages, config_.catalog, prefs, config_.regions); });
    r.plan = detail::run_stage(r.timings, "prosody", [&] {
      return attach_prosody(std::move(r.plan), text, config_.prosody_rules, config_.polarity);
    });
    return r;
  }

  SsmlDocument ssml(std::string_view text, const UserPrefs& prefs) const { return ssml(text, prefs, config_.dialect); }

  SsmlDocument ssml(std::string_view text, const UserPrefs& prefs, const SsmlDialect& dialect) const {
    auto p = plan(text, prefs);
    std::vector<StageTiming> t;
    return detail::run_stage(t, "ssml", [&] { return build_ssml(p.plan, dialect); });
  }

  /// Full text-to-audio run. `cache` may be null.
  PipelineResult run(std::string_view text, const UserPrefs& prefs, const EngineSet& engines,
                     AudioCache* cache = nullptr) const {
    return run(text, prefs, engines, cache, config_.dialect, config_.synth);
  }

  PipelineResult run(std::string_view text, const UserPrefs& prefs, const EngineSet& engines, AudioCache* cache,
                     const SsmlDialect& dialect, const SynthOptions& synth_options) const {
    auto p = plan(text, prefs);
    PipelineResult r;
    r.segments = std::move(p.segments);
    r.languages = std::move(p.languages);
    r.plan = std::move(p.plan);
    r.timings = std::move(p.timings);
    auto synth = detail::run_stage(r.timings, "synthesize",
                       [&] { return synthesize_plan(r.plan, engines, cache, dialect, synth_options); });
    r.audio = std::move(synth.audio);
    r.ssml = std::move(synth.ssml);
    r.engine_requests = synth.engine_requests;
    r.cache_hits = synth.cache_hits;
    return r;
  }

 private:
  PipelineConfig config_;
};

}  // namespace cstts
