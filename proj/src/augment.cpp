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

#include "kws/augment.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "kws/errors.hpp"

namespace kws {

namespace {

double mean_square(const float* p, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += static_cast<double>(p[i]) * static_cast<double>(p[i]);
  }
  return n == 0 ? 0.0 : acc / static_cast<double>(n);
}

void require_finite(const std::vector<float>& samples, const char* what) {
  for (const float v : samples) {
    if (!std::isfinite(v)) {
      throw DomainError(std::string("non-finite sample in ") + what);
    }
  }
}

// Rescales to peak 1 only when the waveform would clip.
double normalize_peak(std::vector<double>* samples) {
  double peak = 0.0;
  for (const double v : *samples) peak = std::max(peak, std::abs(v));
  if (peak <= 1.0) return 1.0;
  const double scale = 1.0 / peak;
  for (auto& v : *samples) v *= scale;
  return scale;
}

}  // namespace

void AugmentSpec::validate() const {
  if (!(snr_db_low <= snr_db_high)) {
    throw ConfigError("snr_db_range low must be <= high");
  }
  if (!(jitter_max_ms >= 0.0)) {
    throw ConfigError("jitter_max_ms must be >= 0");
  }
}

ImpulseResponse load_rir(const std::string& path) {
  const AudioClip clip = load_wav(path);
  ImpulseResponse rir;
  rir.samples = clip.samples;
  rir.sample_rate = clip.sample_rate;
  rir.label = path;
  if (rir.samples.empty()) throw DomainError("empty impulse response");
  require_finite(rir.samples, "impulse response");
  return rir;
}

MixResult mix_at_snr(const AudioClip& signal, const AudioClip& noise,
                     double snr_db, Rng& rng) {
  if (signal.sample_rate != noise.sample_rate) {
    throw ConfigError("signal and noise sample rates differ");
  }
  const std::size_t n = signal.samples.size();
  if (noise.samples.size() < n) {
    throw DataError("noise clip shorter than signal");
  }
  require_finite(signal.samples, "signal");

  MixResult out;
  out.noise_offset = rng.uniform_index(noise.samples.size() - n + 1);
  const float* noise_slice = noise.samples.data() + out.noise_offset;
  require_finite(noise.samples, "noise");

  const double p_signal = mean_square(signal.samples.data(), n);
  const double p_noise = mean_square(noise_slice, n);
  if (p_signal == 0.0) throw DomainError("silent signal clip");
  if (p_noise == 0.0) throw DomainError("silent noise slice");

  out.noise_gain =
      std::sqrt(p_signal / (p_noise * std::pow(10.0, snr_db / 10.0)));

  std::vector<double> mixed(n);
  double p_added = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double added = out.noise_gain * static_cast<double>(noise_slice[i]);
    p_added += added * added;
    mixed[i] = static_cast<double>(signal.samples[i]) + added;
  }
  p_added /= static_cast<double>(n);
  out.realized_snr_db = 10.0 * std::log10(p_signal / p_added);
  out.peak_scale = normalize_peak(&mixed);

  out.mixed.sample_rate = signal.sample_rate;
  out.mixed.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.mixed.samples[i] = static_cast<float>(mixed[i]);
  }
  return out;
}

JitterResult random_jitter(const AudioClip& clip, double max_ms, Rng& rng) {
  if (!(max_ms >= 0.0)) throw ConfigError("jitter max_ms must be >= 0");
  JitterResult out;
  out.shift_ms = rng.uniform(-max_ms, max_ms);
  const auto shift = static_cast<long long>(
      std::llround(out.shift_ms * clip.sample_rate / 1000.0));
  const auto n = static_cast<long long>(clip.samples.size());
  out.clip.sample_rate = clip.sample_rate;
  out.clip.samples.assign(clip.samples.size(), 0.0f);
  for (long long i = 0; i < n; ++i) {
    const long long j = i - shift;
    if (j >= 0 && j < n) out.clip.samples[i] = clip.samples[j];
  }
  return out;
}

AudioClip apply_rir(const AudioClip& clip, const ImpulseResponse& rir) {
  if (clip.sample_rate != rir.sample_rate) {
    throw ConfigError("impulse response sample rate differs from clip");
  }
  if (rir.samples.empty()) throw DomainError("empty impulse response");
  require_finite(rir.samples, "impulse response");

  const std::size_t n = clip.samples.size();
  const std::size_t k_taps = rir.samples.size();
  std::vector<double> out_d(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t k_hi = std::min(t + 1, k_taps);
    double acc = 0.0;
    for (std::size_t k = 0; k < k_hi; ++k) {
      acc += static_cast<double>(rir.samples[k]) *
             static_cast<double>(clip.samples[t - k]);
    }
    out_d[t] = acc;
  }
  normalize_peak(&out_d);

  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.samples[i] = static_cast<float>(out_d[i]);
  }
  return out;
}

AugmentedExample make_training_example(
    const ExampleSource& src, const AugmentSpec& spec,
    const std::vector<AudioClip>& noise_pool,
    const std::vector<ImpulseResponse>& rir_pool, const FeatureConfig& fcfg,
    Rng& rng) {
  spec.validate();
  if (noise_pool.empty()) throw ConfigError("empty noise pool");

  // Draw order is part of the reproducibility contract: rir, jitter, snr,
  // noise index, noise offset.
  AudioClip clip = src.clip;
  if (!rir_pool.empty()) {
    clip = apply_rir(clip, rir_pool[rng.uniform_index(rir_pool.size())]);
  }
  JitterResult jitter = random_jitter(clip, spec.jitter_max_ms, rng);
  const double snr_db = rng.uniform(spec.snr_db_low, spec.snr_db_high);
  const AudioClip& noise = noise_pool[rng.uniform_index(noise_pool.size())];
  const MixResult mix = mix_at_snr(jitter.clip, noise, snr_db, rng);

  AugmentedExample out;
  out.snr_db = snr_db;
  out.realized_snr_db = mix.realized_snr_db;
  out.jitter_ms = jitter.shift_ms;
  out.example.features = featurize(mix.mixed, fcfg);

  // Positive only while the whole keyword, displaced by the realized
  // whole-sample shift, still fits inside the window.
  int label = 0;
  if (src.has_span) {
    const double shift_s =
        static_cast<double>(std::llround(jitter.shift_ms *
                                         src.clip.sample_rate / 1000.0)) /
        src.clip.sample_rate;
    const double begin = src.span_begin_s + shift_s;
    const double end = src.span_end_s + shift_s;
    if (begin >= 0.0 && end <= src.clip.duration_s()) label = 1;
  }
  out.example.label = label;
  return out;
}

}  // namespace kws
