// Command-line front end: synthesize, inspect plans and SSML, or serve HTTP.

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cstts/cstts.hpp"

namespace {

struct Options {
  std::string text;
  std::string file;
  std::optional<std::string> hint;
  std::optional<std::string> mode;
  std::optional<std::string> dialect;
  std::optional<std::string> engine;
  std::optional<std::string> endpoint;
  std::optional<int> pause_ms;
  bool single_request = false;
  std::string config;
  std::string catalog;
  std::vector<std::string> lexicons;
  std::string prefs;
  std::string out;
  std::string host = "127.0.0.1";
  int port = 8080;
};

enum Exit { ok = 0, input_error = 1, engine_error = 2 };

std::string read_text(const Options& o) {
  if (!o.file.empty()) {
    std::ifstream in(o.file, std::ios::binary);
    if (!in) throw cstts::Error(cstts::ErrorCode::io_error, "cannot read " + o.file, "input");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }
  return o.text;
}

cstts::RunConfig run_config(const Options& o) {
  cstts::RunConfig cfg = o.config.empty() ? cstts::RunConfig{} : cstts::RunConfig::from_file(o.config);
  if (!o.prefs.empty()) cfg.prefs = cstts::UserPrefs::from_file(o.prefs);
  if (!o.catalog.empty()) cfg.catalog_path = o.catalog;
  cfg.lexicon_paths.insert(cfg.lexicon_paths.end(), o.lexicons.begin(), o.lexicons.end());
  if (o.dialect) cfg.dialect_name = *o.dialect;
  if (o.engine) {
    if (*o.engine == "mock") cfg.engine = cstts::EngineKind::mock;
    else if (*o.engine == "http") cfg.engine = cstts::EngineKind::http;
    else throw cstts::Error(cstts::ErrorCode::invalid_argument, "unknown engine: " + *o.engine);
  }
  if (o.endpoint) cfg.http_endpoint = *o.endpoint;
  if (o.single_request) cfg.single_request = true;
  if (!o.out.empty()) cfg.output_path = o.out;
  cfg.validate();
  return cfg;
}

cstts::RequestOverrides overrides(const Options& o) {
  cstts::RequestOverrides r;
  r.hint = o.hint;
  r.mode = o.mode;
  r.pause_ms = o.pause_ms;
  return r;
}

int run(const std::string& command, const Options& o) {
  const auto cfg = run_config(o);
  if (command == "serve") {
    cstts::Service service(cfg);
    std::cerr << "listening on " << o.host << ":" << o.port << "\n";
    return service.listen(o.host, o.port) ? ok : input_error;
  }
  const cstts::Pipeline pipeline(cfg.pipeline_config());
  const auto prefs = overrides(o).apply(cfg.prefs);
  const auto text = read_text(o);
  if (command == "segments") {
    std::cout << cstts::segments_to_json(pipeline.plan(text, prefs).languages).dump(2) << "\n";
  } else if (command == "plan") {
    std::cout << cstts::plan_to_json(pipeline.plan(text, prefs).plan).dump(2) << "\n";
  } else if (command == "ssml") {
    std::cout << pipeline.ssml(text, prefs).body << "\n";
  } else {
    if (!cfg.output_path) throw cstts::Error(cstts::ErrorCode::invalid_argument, "synth needs --out");
    cstts::AudioCache cache;
    const auto result = pipeline.run(text, prefs, cfg.engines(), &cache);
    cstts::write_wav_file(*cfg.output_path, result.audio);
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Code-switching text-to-speech orchestration"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    auto* text = sub->add_option("--text", o.text, "Input text");
    sub->add_option("--file", o.file, "Read input text from a file")->excludes(text);
    sub->add_option("--hint", o.hint, "Language code for Latin-script text");
    sub->add_option("--mode", o.mode, "single_voice or multi_voice");
    sub->add_option("--pause-ms", o.pause_ms, "Pause at language switches");
  };
  auto add_config = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "Run configuration JSON");
    sub->add_option("--prefs", o.prefs, "User preferences JSON");
    sub->add_option("--catalog", o.catalog, "Voice catalog JSON");
    sub->add_option("--lexicon", o.lexicons, "Extra stopword lexicon JSON (repeatable)");
    sub->add_option("--dialect", o.dialect, "generic, google, polly or azure");
    sub->add_option("--engine", o.engine, "mock or http");
    sub->add_option("--endpoint", o.endpoint, "HTTP engine URL");
    sub->add_flag("--single-request", o.single_request, "Send one SSML request when possible");
  };

  auto* synth = app.add_subcommand("synth", "Synthesize text to a WAV file");
  add_common(synth);
  add_config(synth);
  synth->add_option("--out", o.out, "Output WAV path")->required();
  for (auto [name, help] : {std::pair{"plan", "Print the voice plan as JSON"},
                            std::pair{"ssml", "Print the SSML document"},
                            std::pair{"segments", "Print language-tagged segments as JSON"}}) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub);
    add_config(sub);
  }
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  add_config(serve);
  serve->add_option("--host", o.host, "Bind address");
  serve->add_option("--port", o.port, "Bind port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : input_error;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), o);
  } catch (const cstts::Error& e) {
    std::cerr << cstts::error_to_json(e).dump() << "\n";
    return e.code() == cstts::ErrorCode::engine_failure ? engine_error : input_error;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"code", "InternalError"}, {"message", e.what()}, {"stage", ""}}.dump() << "\n";
    return input_error;
  }
}
