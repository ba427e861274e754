#pragma once

#include <string>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "cstts/cache.hpp"
#include "cstts/config.hpp"
#include "cstts/engine.hpp"
#include "cstts/error.hpp"
#include "cstts/pipeline.hpp"
#include "cstts/wav.hpp"

namespace cstts {

/// HTTP front end. Each request is an independent pipeline run; the catalog
/// and lexicons are read-only and the audio cache is shared.
class Service {
 public:
  Service(Pipeline pipeline, UserPrefs prefs, EngineSet engines)
      : pipeline_(std::move(pipeline)), prefs_(std::move(prefs)), engines_(std::move(engines)) {
    routes();
  }

  explicit Service(const RunConfig& cfg) : Service(Pipeline(cfg.pipeline_config()), cfg.prefs, cfg.engines()) {}

  bool listen(const std::string& host, int port) { return server_.listen(host, port); }
  int bind_to_any_port(const std::string& host) { return server_.bind_to_any_port(host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void wait_until_ready() const { server_.wait_until_ready(); }
  void stop() { server_.stop(); }

  AudioCache& cache() { return cache_; }

 private:
  struct Parsed {
    std::string text;
    RequestOverrides overrides;
  };

  static Parsed parse(const httplib::Request& req) {
    const auto j = nlohmann::json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::invalid_argument, "body must be a JSON object", "input");
    if (!j.contains("text") || !j.at("text").is_string()) {
      throw Error(ErrorCode::invalid_argument, "missing string field 'text'", "input");
    }
    return {j.at("text").get<std::string>(), RequestOverrides::from_json(j)};
  }

  static void fail(httplib::Response& res, const Error& e) {
    res.status = e.code() == ErrorCode::engine_failure ? 502 : 400;
    res.set_content(error_to_json(e).dump(), "application/json");
  }

  template <typename F>
  static void guarded(httplib::Response& res, F&& f) {
    try {
      f();
    } catch (const Error& e) {
      fail(res, e);
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(nlohmann::json{{"code", "InternalError"}, {"message", e.what()}, {"stage", ""}}.dump(),
                      "application/json");
    }
  }

  void routes() {
    server_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok"})", "application/json");
    });
    server_.Post("/plan", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto p = parse(req);
        const auto r = pipeline_.plan(p.text, p.overrides.apply(prefs_));
        res.set_content(plan_to_json(r.plan).dump(), "application/json");
      });
    });
    server_.Post("/synthesize", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto p = parse(req);
        const auto& cfg = pipeline_.config();
        const auto r = pipeline_.run(p.text, p.overrides.apply(prefs_), engines_, &cache_,
                                     p.overrides.apply(cfg.dialect), p.overrides.apply(cfg.synth));
        res.set_content(encode_wav(r.audio), "audio/wav");
      });
    });
  }

  Pipeline pipeline_;
  UserPrefs prefs_;
  EngineSet engines_;
  AudioCache cache_;
  httplib::Server server_;
};

}  // namespace cstts
