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

#include "kws/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "kws/audio.hpp"
#include "kws/config.hpp"
#include "kws/errors.hpp"
#include "kws/manifest.hpp"
#include "kws/rng.hpp"

namespace kws {

namespace {

constexpr int kRate = 16000;

AudioClip silence(double duration_s) {
  AudioClip clip;
  clip.sample_rate = kRate;
  clip.samples.assign(
      static_cast<std::size_t>(std::llround(duration_s * kRate)), 0.0f);
  return clip;
}

void add_noise(AudioClip* clip, double amp, Rng* rng) {
  for (auto& s : clip->samples) {
    s += static_cast<float>(rng->uniform(-amp, amp));
  }
}

void add_tone(AudioClip* clip, double freq, double begin_s, double end_s,
              double amp, double phase) {
  const auto lo = static_cast<std::size_t>(std::llround(begin_s * kRate));
  const auto hi = std::min(
      clip->samples.size(),
      static_cast<std::size_t>(std::llround(end_s * kRate)));
  for (std::size_t i = lo; i < hi; ++i) {
    const double t = static_cast<double>(i) / kRate;
    clip->samples[i] +=
        static_cast<float>(amp * std::sin(2.0 * std::numbers::pi * freq * t +
                                          phase));
  }
}

// The keyword: tone near 650 Hz then tone near 1000 Hz, back to back.
// `reversed` plays the pair in the other order (a hard negative).
void add_keyword(AudioClip* clip, double begin_s, double tone_s, Rng* rng,
                 bool reversed) {
  const double f1 = 650.0 * (1.0 + rng->uniform(-0.03, 0.03));
  const double f2 = 1000.0 * (1.0 + rng->uniform(-0.03, 0.03));
  const double amp = rng->uniform(0.2, 0.3);
  const double p1 = rng->uniform(0.0, 2.0 * std::numbers::pi);
  const double p2 = rng->uniform(0.0, 2.0 * std::numbers::pi);
  const double mid = begin_s + tone_s;
  add_tone(clip, reversed ? f2 : f1, begin_s, mid, amp, p1);
  add_tone(clip, reversed ? f1 : f2, mid, mid + tone_s, amp, p2);
}

AudioClip toy_positive(Rng* rng) {
  AudioClip clip = silence(1.5);
  add_noise(&clip, 0.01, rng);
  add_keyword(&clip, 0.3, 0.4, rng, false);  // span [0.3, 1.1]
  return clip;
}

AudioClip toy_noise_negative(Rng* rng) {
  AudioClip clip = silence(1.5);
  add_noise(&clip, rng->uniform(0.05, 0.25), rng);
  return clip;
}

AudioClip toy_reversed_negative(Rng* rng) {
  AudioClip clip = silence(1.5);
  add_noise(&clip, 0.01, rng);
  add_keyword(&clip, 0.3, 0.4, rng, true);
  return clip;
}

}  // namespace

ModelConfig toy_model_config() {
  ModelConfig cfg;
  cfg.n_conv_filters = 8;
  cfg.kernel_time = 10;
  cfg.kernel_freq = 4;
  cfg.stride_time = 8;
  cfg.stride_freq = 2;
  cfg.n_rec_layers = 1;
  cfg.rec_hidden = 8;
  cfg.cell_kind = CellKind::kGru;
  cfg.fc_units = 16;
  return cfg;
}

TrainConfig toy_train_config() {
  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.max_epochs = 500;      // 4 steps per epoch over 32 examples
  cfg.early_stop_ce = 0.05;  // stop at 100% train accuracy below this CE
  cfg.seed = 1;
  return cfg;
}

std::vector<LabeledExample> make_toy_examples(const FeatureConfig& fcfg,
                                              std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledExample> out;
  out.reserve(32);
  for (int i = 0; i < 16; ++i) {
    out.push_back({featurize(toy_positive(&rng), fcfg), 1});
  }
  for (int i = 0; i < 8; ++i) {
    out.push_back({featurize(toy_noise_negative(&rng), fcfg), 0});
  }
  for (int i = 0; i < 8; ++i) {
    out.push_back({featurize(toy_reversed_negative(&rng), fcfg), 0});
  }
  return out;
}

ToyDataset write_toy_dataset(const std::string& dir, std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  Rng rng(seed);

  std::vector<ManifestEntry> train;
  auto emit = [&](const std::string& name, const AudioClip& clip,
                  const char* label) {
    const std::string path = (fs::path(dir) / name).string();
    save_wav(path, clip);
    ManifestEntry e;
    e.path = name;  // relative; the loader resolves against the manifest dir
    e.label = label;
    return e;
  };

  char name[64];
  for (int i = 0; i < 16; ++i) {
    std::snprintf(name, sizeof(name), "pos_%02d.wav", i);
    ManifestEntry e = emit(name, toy_positive(&rng), "positive");
    e.has_span = true;
    e.span_begin_s = 0.3;
    e.span_end_s = 1.1;
    train.push_back(e);
  }
  for (int i = 0; i < 8; ++i) {
    std::snprintf(name, sizeof(name), "neg_noise_%02d.wav", i);
    train.push_back(emit(name, toy_noise_negative(&rng), "negative"));
  }
  for (int i = 0; i < 8; ++i) {
    std::snprintf(name, sizeof(name), "neg_rev_%02d.wav", i);
    train.push_back(emit(name, toy_reversed_negative(&rng), "negative"));
  }

  // Pool records: background noise beds longer than one window, plus a
  // short synthetic impulse response (direct path and two reflections).
  for (int i = 0; i < 2; ++i) {
    AudioClip bed = silence(2.5);
    add_noise(&bed, i == 0 ? 0.1 : 0.05, &rng);
    std::snprintf(name, sizeof(name), "pool_noise_%02d.wav", i);
    ManifestEntry e;
    e.path = name;
    e.kind = "noise";
    save_wav((fs::path(dir) / name).string(), bed);
    train.push_back(e);
  }
  {
    AudioClip rir = silence(0.0125);  // 200 taps
    rir.samples[0] = 1.0f;
    rir.samples[40] = 0.3f;
    rir.samples[95] = 0.15f;
    ManifestEntry e;
    e.path = "pool_rir_00.wav";
    e.kind = "rir";
    save_wav((fs::path(dir) / e.path).string(), rir);
    train.push_back(e);
  }

  // Streaming-eval clips: keywords at known offsets inside 3.5 s of quiet
  // noise, plus keyword-free clips.
  std::vector<ManifestEntry> eval;
  const double offsets[4] = {0.5, 1.0, 1.3, 1.7};
  for (int i = 0; i < 4; ++i) {
    AudioClip clip = silence(3.5);
    add_noise(&clip, 0.01, &rng);
    add_keyword(&clip, offsets[i], 0.4, &rng, false);
    std::snprintf(name, sizeof(name), "eval_pos_%02d.wav", i);
    ManifestEntry e = emit(name, clip, "positive");
    e.has_span = true;
    e.span_begin_s = offsets[i];
    e.span_end_s = offsets[i] + 0.8;
    eval.push_back(e);
  }
  for (int i = 0; i < 4; ++i) {
    AudioClip clip = silence(3.5);
    add_noise(&clip, 0.05, &rng);
    if (i >= 2) add_keyword(&clip, 1.0, 0.4, &rng, true);
    std::snprintf(name, sizeof(name), "eval_neg_%02d.wav", i);
    eval.push_back(emit(name, clip, "negative"));
  }

  ToyDataset out;
  out.train_manifest = (fs::path(dir) / "train.jsonl").string();
  out.eval_manifest = (fs::path(dir) / "eval.jsonl").string();
  out.config = (fs::path(dir) / "config.json").string();
  save_manifest(out.train_manifest, train);
  save_manifest(out.eval_manifest, eval);

  CliConfig cfg;
  cfg.model = toy_model_config();
  cfg.train = toy_train_config();
  cfg.augment.snr_db_low = 15.0;   // gentle noise keeps the toy separable
  cfg.augment.snr_db_high = 30.0;
  cfg.augment.jitter_max_ms = 50.0;
  cfg.augment.rng_seed = seed;
  cfg.paths.train_manifest = "train.jsonl";
  cfg.paths.eval_manifest = "eval.jsonl";
  cfg.paths.mine_manifest = "eval.jsonl";
  cfg.paths.checkpoint = "toy.ckws";
  cfg.paths.out_dir = ".";
  std::ofstream file(out.config, std::ios::binary);
  if (!file) throw IoError("cannot write config: " + out.config);
  file << to_json(cfg).dump(2) << "\n";
  return out;
}

}  // namespace kws
