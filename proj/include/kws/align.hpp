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

#ifndef KWS_ALIGN_HPP_
#define KWS_ALIGN_HPP_

#include <string>

#include "kws/audio.hpp"
#include "kws/mat.hpp"

namespace kws {

// Character occupancy scores for one keyword utterance. Row k of `scores`
// holds p(c_k, t) for the k-th keyword character over T frames; values are
// nonnegative and finite. `chars` spells the keyword in UTF-8 with exactly
// one code point per score row.
struct CharPosteriorMatrix {
  std::string chars;
  Mat scores;
  double frame_rate = 100.0;   // frames per second
  double origin_time_s = 0.0;  // absolute time of frame 0

  std::size_t n_chars() const { return scores.rows; }
  std::size_t n_frames() const { return scores.cols; }

  // Throws DomainError when scores are negative or non-finite, or when
  // frame_rate is not a positive finite number.
  void validate() const;
};

struct AlignConfig {
  double alpha = 0.5;     // decay rate, in [0, 1]
  int n_iter = 1;         // decay iterations, >= 1
  int smooth_window = 7;  // moving-average width in frames, odd >= 1
  double pad_s = 0.1;     // chop padding on each side, >= 0

  // Throws ConfigError on any out-of-range field.
  void validate() const;
};

// Keyword span in frames of the posterior matrix and in absolute seconds
// (seconds = origin + frame / frame_rate). `ordered` is false when the decay
// passes produced begin > end; such spans are surfaced to the caller rather
// than silently repaired.
struct AlignmentSpan {
  int begin_frame = 0;
  int end_frame = 0;
  double begin_s = 0.0;
  double end_s = 0.0;
  bool ordered = true;
};

// Centered moving average of width `w` applied to each row independently.
// Edge windows are truncated and normalized by the number of frames actually
// covered, so constant rows pass through unchanged. Throws ConfigError when
// w is even or < 1.
Mat smooth_scores(const Mat& raw, int w);

// Convenience overload that smooths the score matrix and keeps metadata.
CharPosteriorMatrix smooth_scores(const CharPosteriorMatrix& p, int w);

// Locates the keyword span by iterative decay of character scores.
//
// Two working copies of the scores evolve independently for cfg.n_iter
// iterations. Pass A walks characters first to second-to-last: it finds the
// argmax frame T of row k and multiplies row k+1 by alpha at every frame
// t >= T. Pass B walks characters last down to second: it finds the argmax
// frame T of row k and multiplies row k-1 by alpha at every frame t <= T.
// The returned span is begin = min over both copies of the first row's
// argmax and end = max over both copies of the last row's argmax. Argmax
// ties resolve to the smallest frame.
//
// Smoothing is the caller's responsibility (see smooth_scores); this
// function consumes the matrix as given. Throws DimensionError on an empty
// matrix and ConfigError on invalid alpha or n_iter.
AlignmentSpan align_keyword(const CharPosteriorMatrix& p,
                            const AlignConfig& cfg);

// Extracts [begin_s - pad_s, end_s + pad_s] from the clip, clamped to clip
// bounds. Throws DomainError on an unordered span so the caller can retry
// with a different alignment configuration, and ConfigError on pad_s < 0.
AudioClip chop_keyword(const AudioClip& clip, const AlignmentSpan& span,
                       double pad_s);

// Posterior file format "CPST" version 1, little endian: magic, u32 version,
// u32 K, u32 T, f32 frame rate, f32 origin time, u32 byte length of the
// UTF-8 keyword string, the string, then K*T f32 scores row-major.
void save_cpst(const std::string& path, const CharPosteriorMatrix& p);
CharPosteriorMatrix load_cpst(const std::string& path);

}  // namespace kws

#endif  // KWS_ALIGN_HPP_
