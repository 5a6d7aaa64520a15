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

#ifndef KWS_AUDIO_HPP_
#define KWS_AUDIO_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace kws {

// Mono time-domain audio. Samples are dimensionless amplitudes with nominal
// range [-1, 1]; the pipeline standard rate is 16 kHz.
struct AudioClip {
  std::vector<float> samples;
  int sample_rate = 16000;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Reads a RIFF/WAVE file. Accepts PCM 16-bit and IEEE-float 32-bit, mono or
// multichannel; channels are averaged to mono and 16-bit samples are scaled
// by 1/32768. The stored sample rate is preserved as-is; callers that need
// 16 kHz must check (featurize rejects other rates).
//
// Throws FormatError on malformed or truncated headers and UnsupportedError
// on any other sample encoding.
AudioClip load_wav(const std::string& path);

// Writes a mono WAV file. `float_samples` selects IEEE-float 32-bit payload
// (bit-exact round trip through load_wav); otherwise PCM 16-bit.
void save_wav(const std::string& path, const AudioClip& clip,
              bool float_samples = true);

// Extracts samples for [begin_s, end_s), clamped to clip bounds.
AudioClip slice(const AudioClip& clip, double begin_s, double end_s);

}  // namespace kws

#endif  // KWS_AUDIO_HPP_
