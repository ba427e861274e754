#pragma once

#include <chrono>
#include <cstddef>
#include <future>
#include <optional>
#include <thread>
#include <vector>

#include "cstts/audio.hpp"
#include "cstts/cache.hpp"
#include "cstts/engine.hpp"
#include "cstts/error.hpp"
#include "cstts/plan.hpp"
#include "cstts/ssml.hpp"

namespace cstts {

struct SynthOptions {
  bool single_request = false;
  int retries = 2;
  std::chrono::milliseconds base_delay{50};  // doubles per retry
  bool parallel = true;
};

struct SynthResult {
  AudioClip audio;
  std::optional<SsmlDocument> ssml;  // set when one SSML request carried the plan
  std::size_t cache_hits = 0;
  std::size_t engine_requests = 0;
};

/// Retries retryable failures with doubling delay; the last failure escapes.
inline AudioClip render_with_retry(Engine& engine, const EngineRequest& req, const SynthOptions& opts) {
  auto delay = opts.base_delay;
  for (int attempt = 0;; ++attempt) {
    try {
      return engine.render(req);
    } catch (const EngineFailure& e) {
      if (!e.retryable() || attempt >= opts.retries) throw;
    }
    std::this_thread::sleep_for(delay);
    delay *= 2;
  }
}

namespace detail {

inline bool single_engine(const VoicePlan& plan, const EngineSet& engines) {
  const Engine* first = &engines.route(plan.entries.front().voice);
  for (const auto& e : plan.entries) {
    if (&engines.route(e.voice) != first) return false;
  }
  return true;
}

inline std::optional<SynthResult> synthesize_single(const VoicePlan& plan, const EngineSet& engines, AudioCache* cache,
                                                    const SsmlDialect& dialect, const SynthOptions& opts) {
  std::optional<SsmlDocument> doc;
  try {
    doc = build_ssml(plan, dialect);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::size_limit_exceeded) throw;
    return std::nullopt;  // too large for one request; caller goes per entry
  }
  SynthResult result;
  const CacheKey key(doc->body, plan.anchor_voice.id, Prosody{}, to_string(dialect.name), true);
  std::optional<AudioClip> clip = cache ? cache->get(key) : std::nullopt;
  if (clip) {
    ++result.cache_hits;
  } else {
    EngineRequest req{PayloadKind::ssml, doc->body, plan.anchor_voice, Prosody{}, dialect};
    try {
      clip = resample_to_canonical(render_with_retry(engines.route(plan.entries.front().voice), req, opts));
    } catch (EngineFailure& e) {
      e.set_entry_index(0);
      throw;
    }
    ++result.engine_requests;
    if (cache) cache->put(key, *clip);
  }
  result.audio = normalize_audio(std::move(*clip));
  result.ssml = std::move(doc);
  return result;
}

}  // namespace detail

/// Renders a prosody-annotated plan to canonical, peak-normalized audio.
/// With single_request and one engine for every voice, the whole plan goes
/// out as one SSML document; otherwise each entry is rendered (cache first,
/// possibly concurrently) and joined with PCM silence in plan order.
inline SynthResult synthesize_plan(const VoicePlan& plan, const EngineSet& engines, AudioCache* cache,
                                   const SsmlDialect& dialect, const SynthOptions& opts = {}) {
  if (plan.entries.empty()) throw Error(ErrorCode::invalid_argument, "cannot synthesize an empty plan");
  if (opts.single_request && detail::single_engine(plan, engines)) {
    if (auto r = detail::synthesize_single(plan, engines, cache, dialect, opts)) return std::move(*r);
  }

  const std::size_t n = plan.entries.size();
  SynthResult result;
  std::vector<std::optional<AudioClip>> clips(n);
  std::vector<CacheKey> keys;
  keys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = plan.entries[i];
    keys.emplace_back(e.segment.text, e.voice.id, e.prosody, to_string(dialect.name));
    if (cache && (clips[i] = cache->get(keys[i]))) ++result.cache_hits;
  }

  auto render = [&](std::size_t i) {
    const auto& e = plan.entries[i];
    EngineRequest req{PayloadKind::text, e.segment.text, e.voice, e.prosody, dialect};
    return resample_to_canonical(render_with_retry(engines.route(e.voice), req, opts));
  };
  std::vector<std::pair<std::size_t, std::future<AudioClip>>> pending;
  for (std::size_t i = 0; i < n; ++i) {
    if (clips[i]) continue;
    pending.emplace_back(i, std::async(opts.parallel ? std::launch::async : std::launch::deferred, render, i));
  }
  std::optional<EngineFailure> failure;
  std::exception_ptr other;
  for (auto& [i, fut] : pending) {
    try {
      clips[i] = fut.get();
      ++result.engine_requests;
      if (cache) cache->put(keys[i], *clips[i]);
    } catch (EngineFailure& e) {
      if (!failure && !other) {
        e.set_entry_index(static_cast<int>(i));
        failure = e;
      }
    } catch (...) {
      if (!failure && !other) other = std::current_exception();
    }
  }
  if (failure) throw *failure;
  if (other) std::rethrow_exception(other);

  std::vector<AudioClip> ordered;
  std::vector<int> pauses;
  ordered.reserve(n);
  pauses.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ordered.push_back(std::move(*clips[i]));
    pauses.push_back(plan.entries[i].pause_before_ms);
  }
  result.audio = normalize_audio(concat_with_pauses(ordered, pauses));
  return result;
}

}  // namespace cstts
