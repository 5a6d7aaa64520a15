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

#include "kws/align.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kws/errors.hpp"
#include "kws/io_util.hpp"

namespace kws {

namespace {

// Number of UTF-8 code points: bytes that are not continuation bytes.
std::size_t utf8_length(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char b : s) n += (b & 0xC0) != 0x80;
  return n;
}

// Ties resolve to the smallest frame: strict > keeps the first maximum.
std::size_t argmax_row(const Mat& m, std::size_t k) {
  const double* row = m.data.data() + k * m.cols;
  std::size_t best = 0;
  for (std::size_t t = 1; t < m.cols; ++t) {
    if (row[t] > row[best]) best = t;
  }
  return best;
}

}  // namespace

void CharPosteriorMatrix::validate() const {
  for (const double v : scores.data) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DomainError("character scores must be nonnegative and finite");
    }
  }
  if (!std::isfinite(frame_rate) || frame_rate <= 0.0) {
    throw DomainError("frame rate must be positive and finite");
  }
}

void AlignConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("alignment alpha must lie in [0, 1]");
  }
  if (n_iter < 1) throw ConfigError("alignment n_iter must be >= 1");
  if (smooth_window < 1 || smooth_window % 2 == 0) {
    throw ConfigError("smooth window must be odd and >= 1");
  }
  if (!(pad_s >= 0.0)) throw ConfigError("chop padding must be >= 0");
}

Mat smooth_scores(const Mat& raw, int w) {
  if (w < 1 || w % 2 == 0) {
    throw ConfigError("smooth window must be odd and >= 1");
  }
  const std::size_t half = static_cast<std::size_t>(w) / 2;
  Mat out(raw.rows, raw.cols);
  for (std::size_t k = 0; k < raw.rows; ++k) {
    for (std::size_t t = 0; t < raw.cols; ++t) {
      const std::size_t lo = t > half ? t - half : 0;
      const std::size_t hi = std::min(raw.cols - 1, t + half);
      double sum = 0.0;
      for (std::size_t u = lo; u <= hi; ++u) sum += raw(k, u);
      out(k, t) = sum / static_cast<double>(hi - lo + 1);
    }
  }
  return out;
}

CharPosteriorMatrix smooth_scores(const CharPosteriorMatrix& p, int w) {
  CharPosteriorMatrix out = p;
  out.scores = smooth_scores(p.scores, w);
  return out;
}

AlignmentSpan align_keyword(const CharPosteriorMatrix& p,
                            const AlignConfig& cfg) {
  if (p.scores.rows == 0 || p.scores.cols == 0) {
    throw DimensionError("empty posterior matrix");
  }
  p.validate();
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) {
    throw ConfigError("alignment alpha must lie in [0, 1]");
  }
  if (cfg.n_iter < 1) throw ConfigError("alignment n_iter must be >= 1");

  const std::size_t n_chars = p.scores.rows;
  const std::size_t n_frames = p.scores.cols;
  // The two decoding directions evolve independent copies; neither pass sees
  // the other's decay.
  Mat rl = p.scores;
  Mat lr = p.scores;
  for (int n = 0; n < cfg.n_iter; ++n) {
    for (std::size_t k = 0; k + 1 < n_chars; ++k) {
      const std::size_t peak = argmax_row(rl, k);
      double* next = rl.data.data() + (k + 1) * n_frames;
      for (std::size_t t = peak; t < n_frames; ++t) next[t] *= cfg.alpha;
    }
    for (std::size_t k = n_chars - 1; k >= 1; --k) {
      const std::size_t peak = argmax_row(lr, k);
      double* prev = lr.data.data() + (k - 1) * n_frames;
      for (std::size_t t = 0; t <= peak; ++t) prev[t] *= cfg.alpha;
    }
  }
  // Boundary frames come from plain argmaxes of the final copies; the decay
  // passes never assign them directly.
  const std::size_t begin =
      std::min(argmax_row(lr, 0), argmax_row(rl, 0));
  const std::size_t end =
      std::max(argmax_row(lr, n_chars - 1), argmax_row(rl, n_chars - 1));

  AlignmentSpan span;
  span.begin_frame = static_cast<int>(begin);
  span.end_frame = static_cast<int>(end);
  span.begin_s = p.origin_time_s + static_cast<double>(begin) / p.frame_rate;
  span.end_s = p.origin_time_s + static_cast<double>(end) / p.frame_rate;
  span.ordered = begin <= end;
  return span;
}

AudioClip chop_keyword(const AudioClip& clip, const AlignmentSpan& span,
                       double pad_s) {
  if (!(pad_s >= 0.0)) throw ConfigError("chop padding must be >= 0");
  if (!span.ordered) {
    throw DomainError("unordered alignment span; retry with different "
                      "alignment settings");
  }
  return slice(clip, span.begin_s - pad_s, span.end_s + pad_s);
}

void save_cpst(const std::string& path, const CharPosteriorMatrix& p) {
  if (p.scores.rows == 0 || p.scores.cols == 0) {
    throw DimensionError("empty posterior matrix");
  }
  if (utf8_length(p.chars) != p.scores.rows) {
    throw DimensionError("keyword length does not match score rows");
  }
  p.validate();
  std::vector<std::uint8_t> out;
  out.reserve(28 + p.chars.size() + p.scores.size() * 4);
  put_bytes(out, "CPST", 4);
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(p.scores.rows));
  put_u32(out, static_cast<std::uint32_t>(p.scores.cols));
  put_f32(out, static_cast<float>(p.frame_rate));
  put_f32(out, static_cast<float>(p.origin_time_s));
  put_u32(out, static_cast<std::uint32_t>(p.chars.size()));
  put_bytes(out, p.chars.data(), p.chars.size());
  for (const double v : p.scores.data) put_f32(out, static_cast<float>(v));
  write_file(path, out);
}

CharPosteriorMatrix load_cpst(const std::string& path) {
  const auto bytes = read_file(path);
  ByteReader r(bytes.data(), bytes.size());
  if (r.bytes(4, "CPST magic") != "CPST") throw FormatError("bad CPST magic");
  const std::uint32_t version = r.u32("CPST version");
  if (version != 1) {
    throw UnsupportedError("unsupported CPST version " +
                           std::to_string(version));
  }
  const std::uint32_t k = r.u32("char count");
  const std::uint32_t t = r.u32("frame count");
  if (k == 0 || t == 0) throw FormatError("empty CPST matrix");
  CharPosteriorMatrix p;
  p.frame_rate = static_cast<double>(r.f32("frame rate"));
  p.origin_time_s = static_cast<double>(r.f32("origin time"));
  const std::uint32_t chars_len = r.u32("keyword byte length");
  p.chars = r.bytes(chars_len, "keyword string");
  if (utf8_length(p.chars) != k) {
    throw FormatError("keyword length does not match row count");
  }
  p.scores = Mat(k, t);
  r.need(static_cast<std::size_t>(k) * t * 4, "score payload");
  for (auto& v : p.scores.data) v = static_cast<double>(r.f32());
  if (r.remaining() != 0) throw FormatError("trailing bytes in CPST file");
  for (const double v : p.scores.data) {
    if (!std::isfinite(v) || v < 0.0) {
      throw FormatError("invalid score in CPST file");
    }
  }
  if (!std::isfinite(p.frame_rate) || p.frame_rate <= 0.0) {
    throw FormatError("invalid frame rate in CPST file");
  }
  return p;
}

}  // namespace kws
