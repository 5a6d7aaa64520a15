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

#ifndef KWS_SYNTH_HPP_
#define KWS_SYNTH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "kws/features.hpp"
#include "kws/model.hpp"
#include "kws/train.hpp"

namespace kws {

// Synthetic stand-in for keyword data: the "keyword" is a rising two-tone
// pattern (roughly 650 Hz then 1000 Hz). Negatives are white noise or the
// same tones in reversed order, so the detector must model temporal order,
// not just spectral content.

// Scaled-down architecture that overfits the toy set in seconds.
ModelConfig toy_model_config();

// Training settings sized for the 32-example toy problem.
TrainConfig toy_train_config();

// 32 in-memory training examples (16 positives, 8 noise negatives, 8
// reversed-tone negatives), featurized with fcfg. Deterministic in seed.
std::vector<LabeledExample> make_toy_examples(const FeatureConfig& fcfg,
                                              std::uint64_t seed);

struct ToyDataset {
  std::string train_manifest;
  std::string eval_manifest;
  std::string config;  // ready-to-use JSON config wired to the manifests
};

// Writes the on-disk toy fixture under dir: 1.5 s training WAVs with span
// annotations, 3.5 s streaming-eval WAVs, background-noise and impulse-
// response pool files, both manifests, and a config file pointing at them.
ToyDataset write_toy_dataset(const std::string& dir, std::uint64_t seed);

}  // namespace kws

#endif  // KWS_SYNTH_HPP_
