#pragma once

#include <map>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "cstts/engine.hpp"
#include "cstts/error.hpp"
#include "cstts/wav.hpp"

namespace cstts {

struct HttpEngineConfig {
  std::string endpoint;  // scheme://host[:port]/path
  std::map<std::string, std::string> headers;
  int sample_rate_hint = canonical_sample_rate;
  int timeout_s = 10;
};

/// Generic adapter: POSTs {text|ssml, voice_id, sample_rate_hint} as JSON and
/// expects WAV bytes back.
class HttpEngine : public Engine {
 public:
  explicit HttpEngine(HttpEngineConfig cfg) : cfg_(std::move(cfg)) {
    const auto scheme = cfg_.endpoint.find("://");
    if (scheme == std::string::npos) throw Error(ErrorCode::config_error, "endpoint needs a scheme: " + cfg_.endpoint);
    const auto path = cfg_.endpoint.find('/', scheme + 3);
    base_ = cfg_.endpoint.substr(0, path);
    path_ = path == std::string::npos ? "/" : cfg_.endpoint.substr(path);
  }

  std::string name() const override { return "http"; }

  AudioClip render(const EngineRequest& req) override {
    req.validate();
    nlohmann::json body{{"voice_id", req.voice.id}, {"sample_rate_hint", cfg_.sample_rate_hint}};
    if (req.kind == PayloadKind::ssml) {
      body["ssml"] = req.payload;
    } else if (req.prosody.is_zero()) {
      body["text"] = req.payload;
    } else {
      body["ssml"] = wrap_prosody(req);
    }
    httplib::Client client(base_);
    client.set_connection_timeout(cfg_.timeout_s);
    client.set_read_timeout(cfg_.timeout_s);
    httplib::Headers headers(cfg_.headers.begin(), cfg_.headers.end());
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
      throw EngineFailure(0, "engine unreachable: " + httplib::to_string(res.error()), true);
    }
    if (res->status >= 500) throw EngineFailure(res->status, "engine error " + std::to_string(res->status), true);
    if (res->status != 200) throw EngineFailure(res->status, "engine rejected request: " + res->body, false);
    try {
      return decode_wav(res->body);
    } catch (const Error& e) {
      throw EngineFailure(res->status, std::string("undecodable engine response: ") + e.what(), false);
    }
  }

 private:
  static std::string wrap_prosody(const EngineRequest& req) {
    VoicePlanEntry e;
    e.segment.text = req.payload;
    e.voice = req.voice;
    e.locale = req.voice.locale;
    e.prosody = req.prosody;
    VoicePlan plan;
    plan.entries.push_back(e);
    plan.anchor_locale = req.voice.locale;
    plan.anchor_voice = req.voice;
    return build_ssml(plan, req.dialect).body;
  }

  HttpEngineConfig cfg_;
  std::string base_;
  std::string path_;
};

}  // namespace cstts
