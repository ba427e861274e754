#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "cstts/error.hpp"

namespace cstts {

inline constexpr int canonical_sample_rate = 16000;
inline constexpr int canonical_channels = 1;
inline constexpr double normalize_peak = 0.891;  // about -1 dBFS

/// 16-bit PCM; multi-channel samples are interleaved.
struct AudioClip {
  int sample_rate = canonical_sample_rate;
  int channels = canonical_channels;
  std::vector<std::int16_t> samples;

  std::size_t frames() const { return channels > 0 ? samples.size() / static_cast<std::size_t>(channels) : 0; }
  double duration_s() const { return sample_rate > 0 ? static_cast<double>(frames()) / sample_rate : 0.0; }
  bool canonical() const { return sample_rate == canonical_sample_rate && channels == canonical_channels; }

  friend bool operator==(const AudioClip&, const AudioClip&) = default;
};

inline constexpr std::size_t samples_for_ms(int ms, int rate = canonical_sample_rate) {
  return static_cast<std::size_t>(ms) * static_cast<std::size_t>(rate) / 1000;
}

/// Downmixes to mono and linearly interpolates to 16 kHz.
inline AudioClip resample_to_canonical(const AudioClip& in) {
  if (in.sample_rate <= 0 || in.channels <= 0) throw Error(ErrorCode::invalid_audio, "bad sample rate or channel count");
  if (in.samples.empty()) throw Error(ErrorCode::invalid_audio, "zero-length audio");
  if (in.samples.size() % static_cast<std::size_t>(in.channels) != 0) {
    throw Error(ErrorCode::invalid_audio, "sample count is not a multiple of the channel count");
  }
  if (in.canonical()) return in;
  const std::size_t n = in.frames();
  std::vector<double> mono(n);
  for (std::size_t f = 0; f < n; ++f) {
    double sum = 0;
    for (int c = 0; c < in.channels; ++c) sum += in.samples[f * static_cast<std::size_t>(in.channels) + static_cast<std::size_t>(c)];
    mono[f] = sum / in.channels;
  }
  AudioClip out;
  if (in.sample_rate == canonical_sample_rate) {
    out.samples.reserve(n);
    for (double v : mono) out.samples.push_back(static_cast<std::int16_t>(std::lround(v)));
    return out;
  }
  const auto m = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * canonical_sample_rate / static_cast<double>(in.sample_rate)));
  out.samples.resize(m);
  const double step = static_cast<double>(in.sample_rate) / canonical_sample_rate;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = static_cast<double>(i) * step;
    const auto lo = std::min(static_cast<std::size_t>(t), n - 1);
    const auto hi = std::min(lo + 1, n - 1);
    const double frac = t - static_cast<double>(lo);
    const double v = mono[lo] + (mono[hi] - mono[lo]) * std::min(frac, 1.0);
    out.samples[i] = static_cast<std::int16_t>(std::clamp<long>(std::lround(v), -32768, 32767));
  }
  return out;
}

/// Appends clips, inserting pauses_ms[i] of silence before clip i.
inline AudioClip concat_with_pauses(const std::vector<AudioClip>& clips, const std::vector<int>& pauses_ms) {
  if (clips.size() != pauses_ms.size()) throw Error(ErrorCode::invalid_argument, "one pause per clip required");
  AudioClip out;
  std::size_t total = 0;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    if (!clips[i].canonical()) throw Error(ErrorCode::non_canonical_input, "clip " + std::to_string(i) + " is not 16 kHz mono");
    if (pauses_ms[i] < 0) throw Error(ErrorCode::invalid_argument, "negative pause");
    total += samples_for_ms(pauses_ms[i]) + clips[i].samples.size();
  }
  out.samples.reserve(total);
  for (std::size_t i = 0; i < clips.size(); ++i) {
    out.samples.insert(out.samples.end(), samples_for_ms(pauses_ms[i]), 0);
    out.samples.insert(out.samples.end(), clips[i].samples.begin(), clips[i].samples.end());
  }
  return out;
}

/// Scales so the absolute peak lands at 0.891 of full scale. Silence is
/// returned untouched.
inline AudioClip normalize_audio(AudioClip clip) {
  int peak = 0;
  for (auto s : clip.samples) peak = std::max(peak, std::abs(static_cast<int>(s)));
  if (peak == 0) return clip;
  const double target = std::round(normalize_peak * 32767.0);
  const double gain = target / peak;
  for (auto& s : clip.samples) {
    s = static_cast<std::int16_t>(std::clamp<long>(std::lround(s * gain), -32768, 32767));
  }
  return clip;
}

/// Fundamental frequency of a periodic window, from interpolated rising
/// zero crossings of the mean-removed signal.
inline double estimate_f0(const AudioClip& clip, double start_s, double dur_s, double eps = 1e-3) {
  if (!clip.canonical()) throw Error(ErrorCode::non_canonical_input, "estimate_f0 needs 16 kHz mono");
  if (start_s < 0 || dur_s <= 0) throw Error(ErrorCode::invalid_argument, "bad analysis window");
  const auto begin = static_cast<std::size_t>(std::llround(start_s * clip.sample_rate));
  const auto end = std::min(clip.samples.size(), begin + static_cast<std::size_t>(std::llround(dur_s * clip.sample_rate)));
  if (begin >= end) throw Error(ErrorCode::invalid_argument, "analysis window outside clip");
  double mean = 0;
  int peak = 0;
  for (std::size_t i = begin; i < end; ++i) {
    mean += clip.samples[i];
    peak = std::max(peak, std::abs(static_cast<int>(clip.samples[i])));
  }
  mean /= static_cast<double>(end - begin);
  if (peak <= eps * 32767.0) throw Error(ErrorCode::silent_window, "analysis window is silent");
  double first = -1, last = -1;
  std::size_t crossings = 0;
  for (std::size_t i = begin + 1; i < end; ++i) {
    const double a = clip.samples[i - 1] - mean;
    const double b = clip.samples[i] - mean;
    if (a < 0 && b >= 0) {
      const double t = static_cast<double>(i - 1) + a / (a - b);
      if (crossings == 0) first = t;
      last = t;
      ++crossings;
    }
  }
  if (crossings < 2) throw Error(ErrorCode::silent_window, "fewer than two periods in window");
  const double period = (last - first) / static_cast<double>(crossings - 1);
  return clip.sample_rate / period;
}

struct Pause {
  std::size_t start = 0;   // first silent sample
  std::size_t length = 0;  // samples
  double start_s() const { return static_cast<double>(start) / canonical_sample_rate; }
  double duration_s() const { return static_cast<double>(length) / canonical_sample_rate; }
};

/// Interior silent runs (|s| < eps * full scale) of at least min_pause_ms.
/// Leading and trailing silence are not pauses.
inline std::vector<Pause> measure_pauses(const AudioClip& clip, double eps = 1e-3, double min_pause_ms = 10.0) {
  if (!clip.canonical()) throw Error(ErrorCode::non_canonical_input, "measure_pauses needs 16 kHz mono");
  const double threshold = eps * 32767.0;
  const double min_len = min_pause_ms * canonical_sample_rate / 1000.0;
  std::vector<Pause> out;
  const auto& s = clip.samples;
  std::size_t i = 0;
  while (i < s.size() && std::abs(static_cast<int>(s[i])) < threshold) ++i;
  while (i < s.size()) {
    if (std::abs(static_cast<int>(s[i])) >= threshold) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && std::abs(static_cast<int>(s[j])) < threshold) ++j;
    if (j < s.size() && static_cast<double>(j - i) >= min_len) out.push_back({i, j - i});
    i = j;
  }
  return out;
}

}  // namespace cstts
