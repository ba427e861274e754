#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "cstts/audio.hpp"
#include "cstts/error.hpp"

namespace cstts {

namespace detail {

inline void put_u16(std::string& out, std::uint16_t v) {
  out += static_cast<char>(v & 0xFF);
  out += static_cast<char>(v >> 8);
}

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

inline std::uint32_t get_u32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[at + static_cast<std::size_t>(i)]);
  return v;
}

inline std::uint16_t get_u16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) | (static_cast<unsigned char>(b[at + 1]) << 8));
}

}  // namespace detail

/// 16-bit PCM RIFF/WAVE bytes.
inline std::string encode_wav(const AudioClip& clip) {
  if (clip.sample_rate <= 0 || clip.channels <= 0) throw Error(ErrorCode::invalid_audio, "bad sample rate or channel count");
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  const auto block_align = static_cast<std::uint16_t>(clip.channels * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  detail::put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  detail::put_u32(out, 16);
  detail::put_u16(out, 1);
  detail::put_u16(out, static_cast<std::uint16_t>(clip.channels));
  detail::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  detail::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * block_align);
  detail::put_u16(out, block_align);
  detail::put_u16(out, 16);
  out += "data";
  detail::put_u32(out, data_bytes);
  for (auto s : clip.samples) detail::put_u16(out, static_cast<std::uint16_t>(s));
  return out;
}

/// Reads PCM 8/16/24/32-bit or IEEE float32 WAV into 16-bit samples,
/// keeping the source rate and channel count.
inline AudioClip decode_wav(std::string_view b) {
  auto bad = [](const std::string& m) { return Error(ErrorCode::invalid_audio, "WAV: " + m); };
  if (b.size() < 12 || b.substr(0, 4) != "RIFF" || b.substr(8, 4) != "WAVE") throw bad("not a RIFF/WAVE stream");
  std::size_t pos = 12;
  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  while (pos + 8 <= b.size()) {
    const auto id = b.substr(pos, 4);
    const std::uint32_t size = detail::get_u32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      if (size < 16 || body + size > b.size()) throw bad("truncated fmt chunk");
      format = detail::get_u16(b, body);
      channels = detail::get_u16(b, body + 2);
      rate = detail::get_u32(b, body + 4);
      bits = detail::get_u16(b, body + 14);
      if (format == 0xFFFE && size >= 26) format = detail::get_u16(b, body + 24);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw bad("data before fmt");
      if (channels == 0 || rate == 0) throw bad("bad channel count or rate");
      const std::size_t avail = std::min<std::size_t>(size, b.size() - body);
      AudioClip clip;
      clip.sample_rate = static_cast<int>(rate);
      clip.channels = channels;
      const std::size_t width = bits / 8;
      if (width == 0) throw bad("bad bit depth");
      const std::size_t n = avail / width;
      clip.samples.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t at = body + i * width;
        long v = 0;
        if (format == 1 && bits == 8) {
          v = (static_cast<unsigned char>(b[at]) - 128) * 256;
        } else if (format == 1 && bits == 16) {
          v = static_cast<std::int16_t>(detail::get_u16(b, at));
        } else if (format == 1 && bits == 24) {
          std::int32_t x = static_cast<unsigned char>(b[at]) | (static_cast<unsigned char>(b[at + 1]) << 8) |
                           (static_cast<unsigned char>(b[at + 2]) << 16);
          if (x & 0x800000) x -= 0x1000000;
          v = x >> 8;
        } else if (format == 1 && bits == 32) {
          v = static_cast<std::int32_t>(detail::get_u32(b, at)) >> 16;
        } else if (format == 3 && bits == 32) {
          const std::uint32_t raw = detail::get_u32(b, at);
          float f;
          std::memcpy(&f, &raw, sizeof f);
          v = std::lround(std::clamp(static_cast<double>(f), -1.0, 1.0) * 32767.0);
        } else {
          throw bad("unsupported format " + std::to_string(format) + "/" + std::to_string(bits) + " bits");
        }
        clip.samples.push_back(static_cast<std::int16_t>(std::clamp<long>(v, -32768, 32767)));
      }
      clip.samples.resize(clip.samples.size() - clip.samples.size() % channels);
      return clip;
    }
    pos = body + size + (size & 1);
  }
  throw bad("no data chunk");
}

inline void write_wav_file(const std::string& path, const AudioClip& clip) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  const auto bytes = encode_wav(clip);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io_error, "write failed: " + path);
}

inline AudioClip read_wav_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

}  // namespace cstts
