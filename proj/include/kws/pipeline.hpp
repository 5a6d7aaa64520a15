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

#ifndef KWS_PIPELINE_HPP_
#define KWS_PIPELINE_HPP_

#include <string>
#include <vector>

#include "kws/audio.hpp"
#include "kws/augment.hpp"
#include "kws/config.hpp"
#include "kws/manifest.hpp"
#include "kws/model.hpp"
#include "kws/streameval.hpp"
#include "kws/train.hpp"

namespace kws {

// Manifest-driven glue between the library modules and the command line.
// Every function here is deterministic for a fixed config, including the
// worker-parallel ones, whose results do not depend on the worker count.

// Extracts the training window for one manifest entry: [offset_s, +window]
// when an offset is given, a window centered on the span (clamped to the
// clip) when only a span is given, the clip head otherwise. Short clips are
// zero-padded to the full window. The returned span is window-relative and
// set only for positive entries.
ExampleSource window_for_entry(const ManifestEntry& entry,
                               const AudioClip& clip, double window_s);

// Trains on cfg.paths.train_manifest. Dev examples come from, in order of
// preference: cfg.paths.dev_manifest, entries marked split "dev", or the
// training examples themselves featurized without augmentation. Positive
// entries must carry span_s (DataError otherwise); augmentation is skipped
// when the manifest has no noise pool. Throws ConfigError when no training
// examples remain.
TrainResult train_from_manifest(const CliConfig& cfg);

struct EvalSummary {
  int n_files = 0;
  int n_too_short = 0;  // clips shorter than one window, skipped
  int n_keywords = 0;
  double negative_audio_s = 0.0;
  MatchResult at_threshold;  // detect() at cfg.stream operating point
  EvalReport det;            // refractory-free threshold sweep
  double frr_at_fa1 = 0.0;   // percent at <= 1.0 false alarms per hour
  double frr_at_fa05 = 0.0;  // percent at <= 0.5 false alarms per hour
};

// Scores every clip in cfg.paths.eval_manifest with the checkpoint and
// reports detection metrics. Clips are laid out on one timeline with a gap
// well beyond the match tolerance, so per-file results never interact.
EvalSummary evaluate_from_manifest(const CliConfig& cfg,
                                   const Checkpoint& ckpt, int workers,
                                   double match_tol_s = 0.75);

// Scores the negative-labeled clips in cfg.paths.mine_manifest and collects
// windows at or above cfg.stream.threshold, highest first per file, capped
// at cap_per_file.
MiningResult mine_from_manifest(const CliConfig& cfg, const Checkpoint& ckpt,
                                int workers, int cap_per_file = 10);

// Converts mined windows to negative manifest entries with offsets.
std::vector<ManifestEntry> mined_to_entries(const MiningResult& mined);

struct AugmentRow {
  std::string path;  // written feature file
  int label = 0;
  double snr_db = 0.0;
  double realized_snr_db = 0.0;
  double jitter_ms = 0.0;
};

// Writes `count` augmented feature matrices (aug_NNNNN.fmat) under out_dir,
// cycling through the training examples. Example i is seeded from the spec
// seed and i alone, so any worker count produces identical files. Requires a
// noise pool in the train manifest.
std::vector<AugmentRow> materialize_augmented(const CliConfig& cfg, int count,
                                              const std::string& out_dir,
                                              int workers);

void write_augment_csv(const std::string& path,
                       const std::vector<AugmentRow>& rows);

}  // namespace kws

#endif  // KWS_PIPELINE_HPP_
