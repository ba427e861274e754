#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cstts/engine.hpp"
#include "cstts/error.hpp"
#include "cstts/http_engine.hpp"
#include "cstts/language.hpp"
#include "cstts/pipeline.hpp"
#include "cstts/plan.hpp"
#include "cstts/prosody.hpp"
#include "cstts/script.hpp"
#include "cstts/ssml.hpp"
#include "cstts/voice.hpp"

namespace cstts {

inline constexpr int plan_schema_version = 1;

inline nlohmann::json error_to_json(const Error& e) {
  return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}, {"stage", e.stage()}};
}

inline nlohmann::json segments_to_json(const std::vector<LangSegment>& segments) {
  auto j = nlohmann::json::array();
  for (const auto& s : segments) {
    j.push_back({{"text", s.segment.text},
                 {"script", std::string(to_string(s.segment.script))},
                 {"span", {s.segment.span.begin, s.segment.span.end}},
                 {"lang", s.lang.str()},
                 {"confidence", s.detection.confidence},
                 {"method", std::string(to_string(s.detection.method))}});
  }
  return j;
}

inline nlohmann::json prosody_to_json(const Prosody& p) {
  return {{"rate_pct", p.rate_pct}, {"pitch_pct", p.pitch_pct}, {"emphasis", std::string(to_string(p.emphasis))}};
}

inline nlohmann::json plan_to_json(const VoicePlan& plan) {
  auto entries = nlohmann::json::array();
  for (const auto& e : plan.entries) {
    entries.push_back({{"text", e.segment.text},
                       {"script", std::string(to_string(e.segment.script))},
                       {"lang", e.lang.str()},
                       {"locale", e.locale.str()},
                       {"voice_id", e.voice.id},
                       {"lang_span", e.lang_span},
                       {"pause_before_ms", e.pause_before_ms},
                       {"word_count", e.word_count},
                       {"prosody", prosody_to_json(e.prosody)}});
  }
  return {{"schema_version", plan_schema_version},
          {"mode", std::string(to_string(plan.mode))},
          {"anchor", {{"lang", plan.anchor_lang.str()}, {"locale", plan.anchor_locale.str()}, {"voice_id", plan.anchor_voice.id}}},
          {"entries", std::move(entries)}};
}

/// Inverse of plan_to_json. Voices are looked up in `catalog`; unknown ids
/// keep only their id and the entry locale.
inline VoicePlan plan_from_json(const nlohmann::json& j, const VoiceCatalog& catalog = VoiceCatalog::builtin()) {
  try {
    if (j.at("schema_version").get<int>() != plan_schema_version) {
      throw Error(ErrorCode::config_error, "unsupported plan schema_version");
    }
    auto voice = [&](const std::string& id, const Locale& locale) {
      if (const Voice* v = catalog.find(id)) return *v;
      return Voice{id, locale, Gender::neutral, "", ""};
    };
    VoicePlan plan;
    plan.mode = plan_mode_from_string(j.at("mode").get<std::string>());
    const auto& a = j.at("anchor");
    plan.anchor_lang = LangCode::parse(a.at("lang").get<std::string>());
    plan.anchor_locale = Locale::parse(a.at("locale").get<std::string>());
    plan.anchor_voice = voice(a.at("voice_id").get<std::string>(), plan.anchor_locale);
    std::size_t offset = 0;
    for (const auto& je : j.at("entries")) {
      VoicePlanEntry e;
      e.segment.text = je.at("text").get<std::string>();
      const auto script = script_from_string(je.value("script", "Common"));
      e.segment.script = script.value_or(Script::common);
      const std::size_t len = unicode::length(e.segment.text);
      e.segment.span = {offset, offset + len};
      offset += len;
      e.lang = LangCode::parse(je.at("lang").get<std::string>());
      e.locale = Locale::parse(je.at("locale").get<std::string>());
      e.voice = voice(je.at("voice_id").get<std::string>(), e.locale);
      e.lang_span = je.value("lang_span", false);
      e.pause_before_ms = je.value("pause_before_ms", 0);
      e.word_count = je.value("word_count", std::size_t{0});
      if (je.contains("prosody")) {
        const auto& p = je.at("prosody");
        e.prosody = {p.value("rate_pct", 0), p.value("pitch_pct", 0), emphasis_from_string(p.value("emphasis", "none"))};
      }
      plan.entries.push_back(std::move(e));
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::config_error, std::string("bad plan JSON: ") + e.what());
  }
}

/// Per-request knobs shared by the CLI flags and the service body.
struct RequestOverrides {
  std::optional<std::string> hint;
  std::optional<std::string> mode;
  std::optional<std::string> dialect;
  std::optional<int> pause_ms;
  std::optional<bool> single_request;

  static RequestOverrides from_json(const nlohmann::json& j) {
    RequestOverrides o;
    try {
      auto str = [&](const char* key, std::optional<std::string>& out) {
        if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<std::string>();
      };
      str("hint", o.hint);
      str("mode", o.mode);
      str("dialect", o.dialect);
      if (o.dialect) dialect_name_from_string(*o.dialect);
      if (j.contains("pause_ms") && !j.at("pause_ms").is_null()) o.pause_ms = j.at("pause_ms").get<int>();
      if (j.contains("single_request")) o.single_request = j.at("single_request").get<bool>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::invalid_argument, std::string("bad request field: ") + e.what());
    }
    return o;
  }

  UserPrefs apply(UserPrefs prefs) const {
    if (hint) prefs.latin_lang_hint = LangCode::parse(*hint);
    if (mode) prefs.mode = plan_mode_from_string(*mode);
    if (pause_ms) prefs.boundary_pause_ms = *pause_ms;
    prefs.validate();
    return prefs;
  }

  SsmlDialect apply(const SsmlDialect& base) const { return dialect ? SsmlDialect::builtin(*dialect) : base; }

  SynthOptions apply(SynthOptions base) const {
    if (single_request) base.single_request = *single_request;
    return base;
  }
};

enum class EngineKind { mock, http };

/// Everything a CLI or service process needs to build its pipeline.
struct RunConfig {
  UserPrefs prefs;
  std::optional<std::string> catalog_path;
  std::vector<std::string> lexicon_paths;  // merged into the bundled lexicons
  std::optional<std::string> script_table_path;
  std::optional<std::string> region_map_path;
  std::optional<std::string> prosody_rules_path;
  std::string dialect_name = "generic";
  EngineKind engine = EngineKind::mock;
  std::optional<std::string> http_endpoint;
  std::map<std::string, std::string> http_headers;
  bool single_request = false;
  std::optional<std::string> output_path;

  void validate() const {
    prefs.validate();
    dialect_name_from_string(dialect_name);
    if (engine == EngineKind::http && (!http_endpoint || http_endpoint->empty())) {
      throw Error(ErrorCode::config_error, "engine 'http' requires http_endpoint");
    }
    auto must_exist = [](const std::optional<std::string>& p) {
      if (p && !std::filesystem::exists(*p)) throw Error(ErrorCode::io_error, "file not found: " + *p);
    };
    must_exist(catalog_path);
    must_exist(script_table_path);
    must_exist(region_map_path);
    must_exist(prosody_rules_path);
    for (const auto& p : lexicon_paths) must_exist(p);
  }

  static RunConfig from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::config_error, "run config must be a JSON object");
    RunConfig c;
    try {
      auto opt = [&](const char* key, std::optional<std::string>& out) {
        if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<std::string>();
      };
      if (j.contains("prefs")) c.prefs = UserPrefs::from_json(j.at("prefs"));
      opt("catalog_path", c.catalog_path);
      opt("script_table_path", c.script_table_path);
      opt("region_map_path", c.region_map_path);
      opt("prosody_rules_path", c.prosody_rules_path);
      opt("http_endpoint", c.http_endpoint);
      opt("output_path", c.output_path);
      if (j.contains("lexicon_paths")) c.lexicon_paths = j.at("lexicon_paths").get<std::vector<std::string>>();
      c.dialect_name = j.value("dialect_name", c.dialect_name);
      const auto engine = j.value("engine_name", std::string("mock"));
      if (engine == "mock") c.engine = EngineKind::mock;
      else if (engine == "http") c.engine = EngineKind::http;
      else throw Error(ErrorCode::config_error, "unknown engine_name: " + engine);
      if (j.contains("http_headers")) c.http_headers = j.at("http_headers").get<std::map<std::string, std::string>>();
      c.single_request = j.value("single_request", false);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::config_error, std::string("bad run config: ") + e.what());
    }
    c.validate();
    return c;
  }

  static RunConfig from_file(const std::string& path) { return from_json(detail::read_json_file(path, "run config")); }

  PipelineConfig pipeline_config() const {
    PipelineConfig pc;
    if (catalog_path) pc.catalog = VoiceCatalog::from_file(*catalog_path);
    for (const auto& p : lexicon_paths) pc.lexicons.merge(LexiconSet::from_file(p));
    if (script_table_path) pc.scripts = ScriptTable::from_file(*script_table_path);
    if (region_map_path) pc.regions = RegionMap::from_json(detail::read_json_file(*region_map_path, "region map"));
    if (prosody_rules_path) pc.prosody_rules = ProsodyRules::from_json(detail::read_json_file(*prosody_rules_path, "prosody rules"));
    pc.dialect = SsmlDialect::builtin(dialect_name);
    pc.synth.single_request = single_request;
    return pc;
  }

  EngineSet engines() const {
    if (engine == EngineKind::http) {
      return EngineSet(std::make_shared<HttpEngine>(HttpEngineConfig{*http_endpoint, http_headers}));
    }
    return EngineSet(std::make_shared<MockEngine>());
  }
};

}  // namespace cstts
