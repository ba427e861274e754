#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "cstts/config.hpp"
#include "cstts/wav.hpp"

namespace fs = std::filesystem;

namespace {

const std::string data_dir = CSTTS_DATA_DIR;
const std::string cli = CSTTS_CLI_PATH;

nlohmann::json load(const std::string& name) {
  std::ifstream in(data_dir + "/" + name);
  return nlohmann::json::parse(in);
}

struct Outcome {
  int status;
  std::string out;
};

// Runs the CLI with stderr discarded.
Outcome run_cli(const std::string& args) {
  const std::string cmd = "\"" + cli + "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("cstts_cfg_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

void write(const std::string& path, const std::string& content) { std::ofstream(path) << content; }

}  // namespace

TEST(DataFiles, MatchBuiltins) {
  EXPECT_EQ(cstts::ScriptTable::from_file(data_dir + "/scripts.json").ranges(), cstts::ScriptTable::builtin().ranges());
  EXPECT_EQ(cstts::LexiconSet::from_file(data_dir + "/lexicons.json").to_json(), cstts::LexiconSet::builtin().to_json());
  EXPECT_EQ(cstts::ScriptLanguageMap::from_json(load("script_languages.json")), cstts::ScriptLanguageMap::builtin());
  EXPECT_EQ(cstts::VoiceCatalog::from_file(data_dir + "/voices.json"), cstts::VoiceCatalog::builtin());
  EXPECT_EQ(cstts::RegionMap::from_json(load("regions.json")), cstts::RegionMap::builtin());
  EXPECT_EQ(cstts::ProsodyRules::from_json(load("prosody_rules.json")), cstts::ProsodyRules::builtin());
  EXPECT_EQ(cstts::UserPrefs::from_file(data_dir + "/prefs.json").to_json(), cstts::UserPrefs{}.to_json());
  const auto dialects = load("dialects.json");
  ASSERT_EQ(dialects.size(), 4u);
  for (const auto& d : dialects) {
    const auto parsed = cstts::SsmlDialect::from_json(d);
    EXPECT_EQ(parsed, cstts::SsmlDialect::builtin(parsed.name));
  }
}

TEST(PlanJson, RoundTrip) {
  const cstts::Pipeline p;
  for (const char* text : {"I’m from the United States. Soy de los Estados Unidos.",
                           "Merci beaucoup, thank you very much!", "I’m from the United States. 我来自美国。"}) {
    const auto plan = p.plan(text, {}).plan;
    const auto j = cstts::plan_to_json(plan);
    const auto back = cstts::plan_from_json(j);
    EXPECT_EQ(cstts::plan_to_json(back), j);
    ASSERT_EQ(back.entries.size(), plan.entries.size());
    for (std::size_t i = 0; i < plan.entries.size(); ++i) {
      EXPECT_EQ(back.entries[i].voice, plan.entries[i].voice);
      EXPECT_EQ(back.entries[i].segment.span, plan.entries[i].segment.span);
    }
    EXPECT_EQ(cstts::build_ssml(back, {}).body, cstts::build_ssml(plan, {}).body);
  }
  auto j = cstts::plan_to_json(p.plan("Hola amigos", {}).plan);
  j["schema_version"] = 99;
  EXPECT_THROW(cstts::plan_from_json(j), cstts::Error);
  EXPECT_THROW(cstts::plan_from_json(nlohmann::json::object()), cstts::Error);
}

TEST(ErrorJson, Shape) {
  const cstts::Error e(cstts::ErrorCode::empty_input, "input text is empty", "input");
  EXPECT_EQ(cstts::error_to_json(e),
            (nlohmann::json{{"code", "EmptyInput"}, {"message", "input text is empty"}, {"stage", "input"}}));
}

TEST(RequestOverrides, ApplyToPrefsDialectAndOptions) {
  const auto o = cstts::RequestOverrides::from_json(
      nlohmann::json::parse(R"({"text": "x", "hint": "es", "mode": "single_voice", "dialect": "azure",
                                "pause_ms": 703, "single_request": true})"));
  const auto prefs = o.apply(cstts::UserPrefs{});
  EXPECT_EQ(prefs.latin_lang_hint, cstts::LangCode::parse("es"));
  EXPECT_EQ(prefs.mode, cstts::PlanMode::single_voice);
  EXPECT_EQ(prefs.boundary_pause_ms, 703);
  EXPECT_EQ(o.apply(cstts::SsmlDialect{}).name, cstts::DialectName::azure);
  EXPECT_TRUE(o.apply(cstts::SynthOptions{}).single_request);

  EXPECT_THROW(cstts::RequestOverrides::from_json(nlohmann::json::parse(R"({"pause_ms": "x"})")), cstts::Error);
  const auto bad_hint = cstts::RequestOverrides::from_json(nlohmann::json::parse(R"({"hint": "zz"})"));
  EXPECT_THROW(bad_hint.apply(cstts::UserPrefs{}), cstts::Error);
  const auto negative = cstts::RequestOverrides::from_json(nlohmann::json::parse(R"({"pause_ms": -5})"));
  EXPECT_THROW(negative.apply(cstts::UserPrefs{}), cstts::Error);
}

TEST(RunConfig, ParsesAndValidates) {
  TempDir tmp;
  write(tmp.file("lex.json"), R"({"it": ["ciao", "sono", "della", "il", "di"]})");
  const auto cfg = cstts::RunConfig::from_json(nlohmann::json{
      {"prefs", {{"boundary_pause_ms", 189}}},
      {"catalog_path", data_dir + "/voices.json"},
      {"lexicon_paths", {tmp.file("lex.json")}},
      {"dialect_name", "google"},
      {"single_request", true}});
  EXPECT_EQ(cfg.prefs.boundary_pause_ms, 189);
  const auto pc = cfg.pipeline_config();
  EXPECT_EQ(pc.dialect.name, cstts::DialectName::google);
  EXPECT_TRUE(pc.synth.single_request);
  EXPECT_EQ(pc.lexicons.languages_for("ciao"), std::vector<cstts::LangCode>{cstts::LangCode::parse("it")});
  EXPECT_TRUE(pc.lexicons.words(cstts::LangCode::parse("en"))->contains("the"));

  auto fails_with = [](const nlohmann::json& j) {
    try {
      cstts::RunConfig::from_json(j);
    } catch (const cstts::Error& e) {
      return e.code();
    }
    return cstts::ErrorCode::empty_input;
  };
  EXPECT_EQ(fails_with({{"engine_name", "http"}}), cstts::ErrorCode::config_error);
  EXPECT_EQ(fails_with({{"engine_name", "festival"}}), cstts::ErrorCode::config_error);
  EXPECT_EQ(fails_with({{"catalog_path", "/nonexistent.json"}}), cstts::ErrorCode::io_error);
  EXPECT_EQ(fails_with({{"dialect_name", "ssml2"}}), cstts::ErrorCode::invalid_argument);
  EXPECT_EQ(fails_with(nlohmann::json::array()), cstts::ErrorCode::config_error);

  const auto http = cstts::RunConfig::from_json({{"engine_name", "http"}, {"http_endpoint", "http://127.0.0.1:9/tts"}});
  EXPECT_EQ(http.engine, cstts::EngineKind::http);
  EXPECT_NO_THROW(http.engines());
}

TEST(RunConfig, BrokenFilesReportConfigErrors) {
  TempDir tmp;
  write(tmp.file("bad.json"), "{not json");
  try {
    cstts::UserPrefs::from_file(tmp.file("bad.json"));
    FAIL();
  } catch (const cstts::Error& e) {
    EXPECT_EQ(e.code(), cstts::ErrorCode::config_error);
  }
  EXPECT_THROW(cstts::VoiceCatalog::from_file(tmp.file("missing.json")), cstts::Error);
}

TEST(Cli, SynthWritesCanonicalWav) {
  TempDir tmp;
  const auto out = tmp.file("o.wav");
  const auto r = run_cli("synth --text \"Hola world\" --engine mock --out " + out);
  ASSERT_EQ(r.status, 0);
  ASSERT_TRUE(fs::exists(out));
  const auto clip = cstts::read_wav_file(out);
  EXPECT_TRUE(clip.canonical());
  EXPECT_EQ(clip.samples.size(), 10u * 1280);
  std::ifstream in(out, std::ios::binary);
  std::string header(44, '\0');
  in.read(header.data(), 44);
  EXPECT_EQ(header, cstts::encode_wav(clip).substr(0, 44));
}

TEST(Cli, EmptyTextExitsOne) {
  TempDir tmp;
  EXPECT_EQ(run_cli("synth --text \"\" --out " + tmp.file("o.wav")).status, 1);
  EXPECT_EQ(run_cli("plan --text \"   \"").status, 1);
  EXPECT_EQ(run_cli("synth --text hi").status, 1);
  EXPECT_EQ(run_cli("bogus").status, 1);
}

TEST(Cli, PlanPrintsJson) {
  const auto r = run_cli("plan --text \"I'm from the United States. Soy de los Estados Unidos.\" --mode multi_voice");
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.at("entries").size(), 2u);
  EXPECT_EQ(j["entries"][0]["lang"], "en");
  EXPECT_EQ(j["entries"][1]["lang"], "es");
  EXPECT_EQ(j["entries"][1]["pause_before_ms"], 50);
}

TEST(Cli, SsmlAndSegments) {
  auto r = run_cli("ssml --text \"I'm from the United States. 我来自美国。\" --dialect polly");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("<lang xml:lang=\"zh-CN\">"), std::string::npos);
  r = run_cli("segments --text \"Je viens des États-Unis. أنا من الولايات المتحدة.\"");
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[1]["script"], "Arabic");
  EXPECT_EQ(j[1]["lang"], "ar");
}

TEST(Cli, HttpEngineFailureExitsTwo) {
  TempDir tmp;
  const auto r = run_cli("synth --text \"Hola world\" --engine http --endpoint http://127.0.0.1:9/tts --out " +
                         tmp.file("o.wav"));
  EXPECT_EQ(r.status, 2);
}

TEST(Cli, ReadsTextFromFile) {
  TempDir tmp;
  write(tmp.file("in.txt"), "Hola amigos");
  const auto r = run_cli("plan --file " + tmp.file("in.txt") + " --pause-ms 189");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["entries"][0]["lang"], "es");
}

TEST(Cli, PlanTextsKeepTheirLanguageThroughSegments) {
  TempDir tmp;
  const std::string inputs[] = {"I'm from the United States. Soy de los Estados Unidos.",
                                "I'm from the United States. 我来自美国。",
                                "Je viens des États-Unis. أنا من الولايات المتحدة.",
                                "Merci beaucoup, thank you very much!"};
  for (const auto& text : inputs) {
    write(tmp.file("in.txt"), text);
    const auto plan = run_cli("plan --file " + tmp.file("in.txt"));
    ASSERT_EQ(plan.status, 0) << text;
    for (const auto& entry : nlohmann::json::parse(plan.out)["entries"]) {
      write(tmp.file("entry.txt"), entry["text"].get<std::string>());
      const auto segs = run_cli("segments --file " + tmp.file("entry.txt"));
      ASSERT_EQ(segs.status, 0);
      for (const auto& s : nlohmann::json::parse(segs.out)) EXPECT_EQ(s["lang"], entry["lang"]) << entry["text"];
    }
  }
}
