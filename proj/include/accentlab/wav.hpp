// accentlab/wav.hpp

// Copyright 2026  Accentlab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ACCENTLAB_WAV_HPP_
#define ACCENTLAB_WAV_HPP_

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "accentlab/error.hpp"

namespace accentlab {

struct Waveform {
  std::vector<double> samples;  // normalized to [-1, 1]
  int sample_rate = 0;
};

namespace detail {
inline std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
}  // namespace detail

// Reads a mono 16-bit signed little-endian PCM WAV file.
inline Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_wav: cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw SchemaError("read_wav: not a RIFF/WAVE file: " + path);

  Waveform w;
  bool have_fmt = false, have_data = false;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    char id[5] = {0};
    std::memcpy(id, bytes.data() + pos, 4);
    std::uint32_t chunk_size = detail::read_u32le(bytes.data() + pos + 4);
    size_t body = pos + 8;
    if (body + chunk_size > bytes.size())
      throw SchemaError("read_wav: truncated chunk '" + std::string(id) + "' in " + path);
    if (std::strcmp(id, "fmt ") == 0) {
      if (chunk_size < 16) throw SchemaError("read_wav: short fmt chunk in " + path);
      std::uint16_t audio_format = detail::read_u16le(bytes.data() + body);
      std::uint16_t channels = detail::read_u16le(bytes.data() + body + 2);
      std::uint32_t rate = detail::read_u32le(bytes.data() + body + 4);
      std::uint16_t bits = detail::read_u16le(bytes.data() + body + 14);
      if (audio_format != 1)
        throw SchemaError("read_wav: only PCM (format 1) supported, got format " +
                          std::to_string(audio_format));
      if (channels != 1)
        throw SchemaError("read_wav: only mono supported, got " + std::to_string(channels) +
                          " channels");
      if (bits != 16)
        throw SchemaError("read_wav: only 16-bit samples supported, got " + std::to_string(bits));
      w.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (std::strcmp(id, "data") == 0) {
      size_t n = chunk_size / 2;
      w.samples.resize(n);
      for (size_t i = 0; i < n; ++i) {
        std::int16_t s;
        std::memcpy(&s, bytes.data() + body + 2 * i, 2);
        w.samples[i] = static_cast<double>(s) / 32768.0;
      }
      have_data = true;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }
  if (!have_fmt || !have_data)
    throw SchemaError("read_wav: missing fmt or data chunk in " + path);
  if (w.sample_rate <= 0) throw SchemaError("read_wav: bad sample rate in " + path);
  return w;
}

inline void write_wav(const std::string& path, const Waveform& w) {
  if (w.sample_rate <= 0) throw InvalidInput("write_wav: sample_rate must be positive");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_wav: cannot open " + path);
  auto put_u32 = [&out](std::uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                 static_cast<char>(v >> 24)};
    out.write(b, 4);
  };
  auto put_u16 = [&out](std::uint16_t v) {
    char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
    out.write(b, 2);
  };
  std::uint32_t data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  out.write("RIFF", 4);
  put_u32(36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(static_cast<std::uint32_t>(w.sample_rate));
  put_u32(static_cast<std::uint32_t>(w.sample_rate * 2));
  put_u16(2);
  put_u16(16);
  out.write("data", 4);
  put_u32(data_bytes);
  for (double v : w.samples) {
    double clamped = v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v);
    auto s = static_cast<std::int16_t>(std::lrint(clamped * 32767.0));
    char b[2] = {static_cast<char>(s & 0xFF), static_cast<char>((s >> 8) & 0xFF)};
    out.write(b, 2);
  }
  if (!out) throw IoError("write_wav: write failed for " + path);
}

}  // namespace accentlab

#endif  // ACCENTLAB_WAV_HPP_
