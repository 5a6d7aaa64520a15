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

#ifndef KWS_FEATURES_HPP_
#define KWS_FEATURES_HPP_

#include <string>

#include "kws/audio.hpp"
#include "kws/mat.hpp"

namespace kws {

// Per-channel energy normalization constants. With smoother state M(t) =
// (1-s) M(t-1) + s E(t), M(0) = E(0), the output per cell is
//   (E / (floor + M)^alpha + delta)^root - delta^root.
struct PcenConfig {
  double smoother = 0.025;  // s, in (0, 1]
  double alpha = 0.98;      // gain exponent, in (0, 1]
  double delta = 2.0;       // bias, >= 0
  double root = 0.5;        // compression root, in (0, 1]
  double floor = 1e-6;      // epsilon, > 0
};

enum class FrontendMode {
  kPcen,    // standard pipeline
  kLogMel,  // debug alternative: log(E + floor)
};

struct FeatureConfig {
  int sample_rate = 16000;
  double window_ms = 25.0;
  double hop_ms = 10.0;
  int fft_size = 512;  // must be a power of two
  int n_mels = 40;
  double fmin = 20.0;
  double fmax = 8000.0;
  PcenConfig pcen;
  FrontendMode mode = FrontendMode::kPcen;

  int hop_samples() const;
  int window_samples() const;
  // Throws ConfigError when fields are inconsistent (non-integral hop,
  // window larger than FFT, fmax above Nyquist, ...).
  void validate() const;
};

// n_mels x n_frames feature matrix. Rows are mel channels, columns are
// frames at hop_ms spacing. A 1.5 s clip at the default config is 40x151.
struct FeatureMatrix {
  Mat values;
  double hop_ms = 10.0;
  double origin_time_s = 0.0;

  std::size_t n_mels() const { return values.rows; }
  std::size_t n_frames() const { return values.cols; }
};

// Mel-filterbank energies: centered frames with zero padding at the edges,
// periodic Hann window, magnitude-squared FFT pooled through triangular mel
// filters (HTK mel scale, unit peak). n_frames = floor(len / hop) + 1.
// Throws DomainError when the clip is shorter than one hop and ConfigError
// on a sample-rate mismatch.
Mat mel_energies(const AudioClip& clip, const FeatureConfig& cfg);

// Applies PCEN to a nonnegative energy matrix (rows = channels, cols =
// frames). Throws DomainError on negative input.
FeatureMatrix pcen(const Mat& energies, const PcenConfig& cfg,
                   double hop_ms = 10.0, double origin_time_s = 0.0);

// Full frontend: pcen(mel_energies(clip)) (or log-mel in debug mode).
// Deterministic, pure. Throws ConfigError when the clip's rate does not
// match the config.
FeatureMatrix featurize(const AudioClip& clip, const FeatureConfig& cfg);

// FMAT container: magic "FMAT", u32 LE version=1, u32 rows, u32 cols,
// f32 LE row-major payload.
void save_fmat(const std::string& path, const FeatureMatrix& m);
FeatureMatrix load_fmat(const std::string& path);

}  // namespace kws

#endif  // KWS_FEATURES_HPP_
