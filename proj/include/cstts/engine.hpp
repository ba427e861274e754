#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "cstts/audio.hpp"
#include "cstts/error.hpp"
#include "cstts/plan.hpp"
#include "cstts/ssml.hpp"
#include "cstts/unicode.hpp"

namespace cstts {

enum class PayloadKind { text, ssml };

struct EngineRequest {
  PayloadKind kind = PayloadKind::text;
  std::string payload;
  Voice voice;
  Prosody prosody;
  SsmlDialect dialect;

  void validate() const {
    if (payload.empty()) throw Error(ErrorCode::invalid_argument, "empty engine payload");
    auto in_range = [](int v) { return v >= Prosody::min_pct && v <= Prosody::max_pct; };
    if (!in_range(prosody.rate_pct) || !in_range(prosody.pitch_pct)) {
      throw Error(ErrorCode::invalid_argument, "prosody outside clamp range");
    }
  }
};

/// Synthesis boundary. Implementations must tolerate concurrent render calls.
class Engine {
 public:
  virtual ~Engine() = default;
  virtual std::string name() const = 0;
  /// Any sample rate or channel layout; failures raise EngineFailure.
  virtual AudioClip render(const EngineRequest& req) = 0;
};

inline std::uint32_t fnv1a32(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

/// Offline engine: one tone per voice, 80 ms per character.
class MockEngine : public Engine {
 public:
  static constexpr int samples_per_char = 1280;
  static constexpr double amplitude = 0.5;

  static double base_frequency(std::string_view voice_id) { return 200.0 + 10.0 * (fnv1a32(voice_id) % 40); }

  static double frequency(std::string_view voice_id, const Prosody& p) {
    return base_frequency(voice_id) * (1.0 + p.pitch_pct / 100.0);
  }

  static std::size_t sample_count(std::size_t chars, const Prosody& p) {
    return static_cast<std::size_t>(
        std::llround(static_cast<double>(chars) * samples_per_char / (1.0 + p.rate_pct / 100.0)));
  }

  std::string name() const override { return "mock"; }

  AudioClip render(const EngineRequest& req) override {
    req.validate();
    calls_.fetch_add(1, std::memory_order_relaxed);
    AudioClip out;
    if (req.kind == PayloadKind::text) {
      append_tone(out, req.payload, req.voice.id, req.prosody);
      return out;
    }
    for (const auto& piece : interpret_ssml(req.payload, req.voice.id)) {
      if (piece.is_pause()) {
        out.samples.insert(out.samples.end(), samples_for_ms(piece.pause_ms), 0);
      } else {
        append_tone(out, piece.text, piece.voice_id, piece.prosody);
      }
    }
    return out;
  }

  std::size_t calls() const { return calls_.load(std::memory_order_relaxed); }
  void reset_calls() { calls_.store(0, std::memory_order_relaxed); }

 private:
  // Cosine phase: each clip starts at its peak rather than at a zero.
  static void append_tone(AudioClip& out, std::string_view text, std::string_view voice_id, const Prosody& p) {
    const std::size_t n = sample_count(unicode::length(text), p);
    const double w = 2.0 * std::numbers::pi * frequency(voice_id, p) / canonical_sample_rate;
    const double a = amplitude * 32767.0;
    out.samples.reserve(out.samples.size() + n);
    for (std::size_t i = 0; i < n; ++i) {
      out.samples.push_back(static_cast<std::int16_t>(std::lround(a * std::cos(w * static_cast<double>(i)))));
    }
  }

  std::atomic<std::size_t> calls_{0};
};

/// Routes each voice to the engine named in its catalog entry, falling back
/// to the default engine.
class EngineSet {
 public:
  explicit EngineSet(std::shared_ptr<Engine> fallback) : fallback_(std::move(fallback)) {
    if (!fallback_) throw Error(ErrorCode::invalid_argument, "EngineSet needs a default engine");
  }

  void add(const std::string& engine_name, std::shared_ptr<Engine> engine) { engines_[engine_name] = std::move(engine); }

  Engine& route(const Voice& voice) const {
    auto it = engines_.find(voice.engine);
    return it == engines_.end() ? *fallback_ : *it->second;
  }

 private:
  std::shared_ptr<Engine> fallback_;
  std::map<std::string, std::shared_ptr<Engine>> engines_;
};

}  // namespace cstts
