#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "cstts/audio.hpp"
#include "cstts/plan.hpp"

namespace cstts {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Identity of a synthesized clip. The canonical string length-prefixes every
/// field, so distinct inputs never share a key; the digest is for display.
class CacheKey {
 public:
  CacheKey(std::string_view payload, std::string_view voice_id, const Prosody& prosody, std::string_view dialect,
           bool ssml_payload = false) {
    auto field = [this](std::string_view v) {
      canonical_ += std::to_string(v.size());
      canonical_ += ':';
      canonical_ += v;
    };
    field(ssml_payload ? "ssml" : "text");
    field(payload);
    field(voice_id);
    field(std::to_string(prosody.rate_pct));
    field(std::to_string(prosody.pitch_pct));
    field(to_string(prosody.emphasis));
    field(dialect);
  }

  const std::string& canonical() const { return canonical_; }

  std::string digest() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_)));
    return buf;
  }

  friend bool operator==(const CacheKey&, const CacheKey&) = default;

 private:
  std::string canonical_;
};

/// Thread-safe clip store: concurrent readers, last writer wins.
class AudioCache {
 public:
  std::optional<AudioClip> get(const CacheKey& key) const {
    std::shared_lock lock(mu_);
    auto it = clips_.find(key.canonical());
    if (it == clips_.end()) {
      ++misses_;
      return std::nullopt;
    }
    ++hits_;
    return it->second;
  }

  void put(const CacheKey& key, AudioClip clip) {
    std::unique_lock lock(mu_);
    clips_.insert_or_assign(key.canonical(), std::move(clip));
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return clips_.size();
  }

  void clear() {
    std::unique_lock lock(mu_);
    clips_.clear();
    hits_ = 0;
    misses_ = 0;
  }

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, AudioClip> clips_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
};

}  // namespace cstts
