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

#ifndef KWS_AUGMENT_HPP_
#define KWS_AUGMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kws/audio.hpp"
#include "kws/features.hpp"
#include "kws/rng.hpp"
#include "kws/train.hpp"

namespace kws {

struct AugmentSpec {
  double snr_db_low = -5.0;
  double snr_db_high = 15.0;
  double jitter_max_ms = 100.0;
  std::vector<std::string> rir_paths;
  std::uint64_t rng_seed = 1;

  // Throws ConfigError when low > high or jitter_max_ms < 0.
  void validate() const;
};

// Measured room impulse response. `label` is a free-form descriptor
// (distance, angle) carried through from the source manifest.
struct ImpulseResponse {
  std::vector<float> samples;
  int sample_rate = 16000;
  std::string label;
};

// Reads a WAV file as an impulse response; the label is the file path.
// Throws DomainError when the file is empty or contains non-finite samples.
ImpulseResponse load_rir(const std::string& path);

struct MixResult {
  AudioClip mixed;
  double noise_gain = 0.0;        // gain applied to the noise slice
  std::size_t noise_offset = 0;   // slice start within the noise clip
  double realized_snr_db = 0.0;   // measured on the summed components
  double peak_scale = 1.0;        // < 1 only when clipping forced a rescale
};

// Adds a random slice of `noise` to `signal` at the requested SNR. Powers
// are mean squares: the signal's over its full length, the noise's over the
// slice actually used, so the realized SNR tracks the request within 0.05 dB
// regardless of where the slice lands. When the sum would exceed |1| the
// output is rescaled to peak 1, which leaves the SNR unchanged.
//
// Throws ConfigError on a sample-rate mismatch, DataError when the noise is
// shorter than the signal, and DomainError when either clip is silent (zero
// power makes the SNR undefined).
MixResult mix_at_snr(const AudioClip& signal, const AudioClip& noise,
                     double snr_db, Rng& rng);

struct JitterResult {
  AudioClip clip;
  double shift_ms = 0.0;  // drawn shift; applied displacement is the
                          // nearest whole sample
};

// Translates the clip by a uniform shift in [-max_ms, +max_ms]. Vacated
// samples are zero-filled and the length is preserved. Throws ConfigError
// on max_ms < 0.
JitterResult random_jitter(const AudioClip& clip, double max_ms, Rng& rng);

// Full linear convolution with the impulse response, truncated to the input
// length, peak-normalized only if the result would clip. A unit-delta
// response reproduces the input exactly. Throws ConfigError on a sample-rate
// mismatch and DomainError on an empty or non-finite response.
AudioClip apply_rir(const AudioClip& clip, const ImpulseResponse& rir);

// One window-length source clip plus the keyword span within it, when known.
struct ExampleSource {
  AudioClip clip;
  bool has_span = false;
  double span_begin_s = 0.0;
  double span_end_s = 0.0;
};

struct AugmentedExample {
  LabeledExample example;
  double snr_db = 0.0;          // drawn target SNR
  double realized_snr_db = 0.0;
  double jitter_ms = 0.0;       // drawn shift
};

// Augmentation pipeline for one training window: optional impulse response
// (uniform choice from the pool; skipped when the pool is empty), timing
// jitter, additive noise at an SNR drawn uniformly from the spec range, then
// feature extraction. The label stays positive only while the whole jittered
// keyword span remains inside the window; clips without a span are negative.
//
// All randomness comes from `rng`, so a fixed seed reproduces the example
// bit for bit. Throws ConfigError on an empty noise pool; stage errors
// propagate.
AugmentedExample make_training_example(const ExampleSource& src,
                                       const AugmentSpec& spec,
                                       const std::vector<AudioClip>& noise_pool,
                                       const std::vector<ImpulseResponse>& rir_pool,
                                       const FeatureConfig& fcfg, Rng& rng);

}  // namespace kws

#endif  // KWS_AUGMENT_HPP_
