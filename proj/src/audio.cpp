/* Copyright 2026 The kws-crnn Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "kws/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "kws/errors.hpp"
#include "kws/io_util.hpp"

namespace kws {

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::string& path,
                const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatIeeeFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct WavFmt {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

}  // namespace

AudioClip load_wav(const std::string& path) {
  const auto bytes = read_file(path);
  ByteReader r(bytes.data(), bytes.size());

  if (r.bytes(4, "RIFF tag") != "RIFF") throw FormatError("not a RIFF file");
  r.u32("RIFF size");
  if (r.bytes(4, "WAVE tag") != "WAVE") throw FormatError("not a WAVE file");

  WavFmt fmt;
  bool have_fmt = false;
  std::size_t data_pos = 0;
  std::size_t data_len = 0;
  bool have_data = false;

  // Chunk scan. Chunks are word-aligned; unknown chunks are skipped.
  while (r.remaining() >= 8) {
    const std::string id = r.bytes(4, "chunk id");
    const std::uint32_t len = r.u32("chunk size");
    if (id == "fmt ") {
      if (len < 16) throw FormatError("fmt chunk too short");
      const std::size_t chunk_end = r.pos() + len;
      fmt.format = r.u16("format code");
      fmt.channels = r.u16("channel count");
      fmt.sample_rate = r.u32("sample rate");
      r.u32("byte rate");
      r.u16("block align");
      fmt.bits = r.u16("bits per sample");
      if (fmt.format == kFormatExtensible) {
        // cbSize(2) + valid bits(2) + channel mask(4) + subformat GUID. The
        // first two GUID bytes carry the real format code.
        if (len < 40) throw FormatError("extensible fmt chunk too short");
        r.u16("cbSize");
        r.u16("valid bits");
        r.u32("channel mask");
        fmt.format = r.u16("subformat code");
      }
      r.skip(chunk_end - r.pos(), "fmt tail");
      have_fmt = true;
    } else if (id == "data") {
      if (len > r.remaining()) throw FormatError("data chunk truncated");
      data_pos = r.pos();
      data_len = len;
      have_data = true;
      r.skip(len, "data payload");
    } else {
      if (len > r.remaining()) throw FormatError("chunk truncated: " + id);
      r.skip(len, "chunk payload");
    }
    if ((len & 1) != 0 && r.remaining() > 0) r.skip(1, "chunk pad");
  }

  if (!have_fmt) throw FormatError("missing fmt chunk");
  if (!have_data) throw FormatError("missing data chunk");
  if (fmt.channels == 0) throw FormatError("zero channel count");
  if (fmt.sample_rate == 0) throw FormatError("zero sample rate");

  const bool pcm16 = fmt.format == kFormatPcm && fmt.bits == 16;
  const bool f32 = fmt.format == kFormatIeeeFloat && fmt.bits == 32;
  if (!pcm16 && !f32) {
    throw UnsupportedError("unsupported WAV encoding: format code " +
                           std::to_string(fmt.format) + ", " +
                           std::to_string(fmt.bits) + " bits");
  }

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  if (frame_bytes == 0 || data_len % frame_bytes != 0) {
    throw FormatError("data chunk size is not a whole number of frames");
  }
  const std::size_t n_frames = data_len / frame_bytes;

  AudioClip clip;
  clip.sample_rate = static_cast<int>(fmt.sample_rate);
  clip.samples.resize(n_frames);

  ByteReader d(bytes.data() + data_pos, data_len);
  const double inv_channels = 1.0 / fmt.channels;
  for (std::size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < fmt.channels; ++c) {
      if (pcm16) {
        const auto raw = static_cast<std::int16_t>(d.u16("sample"));
        acc += raw / 32768.0;
      } else {
        acc += d.f32("sample");
      }
    }
    clip.samples[i] = static_cast<float>(acc * inv_channels);
  }
  return clip;
}

void save_wav(const std::string& path, const AudioClip& clip,
              bool float_samples) {
  const std::uint16_t bits = float_samples ? 32 : 16;
  const std::uint16_t format = float_samples ? kFormatIeeeFloat : kFormatPcm;
  const std::uint32_t byte_rate =
      static_cast<std::uint32_t>(clip.sample_rate) * bits / 8;
  const std::uint32_t data_len =
      static_cast<std::uint32_t>(clip.samples.size()) * bits / 8;

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_len);
  put_bytes(out, "RIFF", 4);
  put_u32(out, 36 + data_len);
  put_bytes(out, "WAVE", 4);
  put_bytes(out, "fmt ", 4);
  put_u32(out, 16);
  out.push_back(static_cast<std::uint8_t>(format));
  out.push_back(static_cast<std::uint8_t>(format >> 8));
  out.push_back(1);  // mono
  out.push_back(0);
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, byte_rate);
  out.push_back(static_cast<std::uint8_t>(bits / 8));
  out.push_back(0);
  out.push_back(static_cast<std::uint8_t>(bits));
  out.push_back(0);
  put_bytes(out, "data", 4);
  put_u32(out, data_len);
  for (const float s : clip.samples) {
    if (float_samples) {
      put_f32(out, s);
    } else {
      const double scaled = std::round(static_cast<double>(s) * 32768.0);
      const auto clamped = static_cast<std::int16_t>(
          std::clamp(scaled, -32768.0, 32767.0));
      out.push_back(static_cast<std::uint8_t>(clamped & 0xFF));
      out.push_back(static_cast<std::uint8_t>((clamped >> 8) & 0xFF));
    }
  }
  write_file(path, out);
}

AudioClip slice(const AudioClip& clip, double begin_s, double end_s) {
  const auto n = static_cast<double>(clip.samples.size());
  const double b = std::clamp(begin_s * clip.sample_rate, 0.0, n);
  const double e = std::clamp(end_s * clip.sample_rate, 0.0, n);
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  const auto bi = static_cast<std::size_t>(std::llround(b));
  const auto ei = static_cast<std::size_t>(std::llround(e));
  if (ei > bi) {
    out.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(bi),
                       clip.samples.begin() + static_cast<std::ptrdiff_t>(ei));
  }
  return out;
}

}  // namespace kws
