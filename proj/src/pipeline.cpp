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

#include "kws/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <utility>

#include "kws/errors.hpp"
#include "kws/features.hpp"
#include "kws/rng.hpp"
#include "kws/threadpool.hpp"

namespace kws {

namespace {

struct Pools {
  std::vector<AudioClip> noise;
  std::vector<ImpulseResponse> rirs;
};

Pools load_pools(const Manifest& manifest, const AugmentSpec& spec) {
  Pools pools;
  for (const auto& entry : manifest.entries) {
    if (entry.kind == "noise") {
      pools.noise.push_back(load_wav(entry.path));
    } else if (entry.kind == "rir") {
      pools.rirs.push_back(load_rir(entry.path));
    }
  }
  for (const auto& path : spec.rir_paths) pools.rirs.push_back(load_rir(path));
  return pools;
}

struct DevSource {
  ExampleSource src;
  int label = 0;
};

struct TrainSources {
  std::vector<ExampleSource> train;
  std::vector<DevSource> split_dev;  // entries marked split "dev"
};

TrainSources collect_train_sources(const Manifest& manifest, double window_s) {
  TrainSources out;
  for (const auto& entry : manifest.entries) {
    if (!entry.is_example()) continue;
    if (entry.is_positive() && !entry.has_span) {
      throw DataError("positive entry without span_s: " + entry.path);
    }
    ExampleSource src =
        window_for_entry(entry, load_wav(entry.path), window_s);
    if (entry.split == "dev") {
      out.split_dev.push_back({std::move(src), entry.is_positive() ? 1 : 0});
    } else {
      out.train.push_back(std::move(src));
    }
  }
  return out;
}

}  // namespace

ExampleSource window_for_entry(const ManifestEntry& entry,
                               const AudioClip& clip, double window_s) {
  const double duration = clip.duration_s();
  double begin = 0.0;
  if (entry.has_offset) {
    begin = entry.offset_s;
  } else if (entry.has_span) {
    begin = 0.5 * (entry.span_begin_s + entry.span_end_s) - 0.5 * window_s;
    begin = std::min(begin, duration - window_s);
    begin = std::max(begin, 0.0);
  }

  ExampleSource src;
  src.clip = slice(clip, begin, begin + window_s);
  const auto want = static_cast<std::size_t>(
      std::llround(window_s * clip.sample_rate));
  if (src.clip.samples.size() < want) src.clip.samples.resize(want, 0.0f);

  // A span truncated by the window means the window holds only part of the
  // keyword, so the example cannot honestly stay positive.
  if (entry.is_positive() && entry.has_span &&
      entry.span_begin_s >= begin - 1e-9 &&
      entry.span_end_s <= begin + window_s + 1e-9) {
    src.has_span = true;
    src.span_begin_s = entry.span_begin_s - begin;
    src.span_end_s = entry.span_end_s - begin;
  }
  return src;
}

TrainResult train_from_manifest(const CliConfig& cfg) {
  if (cfg.paths.train_manifest.empty()) {
    throw ConfigError("paths.train_manifest is not set");
  }
  const Manifest manifest = load_manifest(cfg.paths.train_manifest);
  const double window_s = cfg.stream.window_s;
  TrainSources sources = collect_train_sources(manifest, window_s);
  if (sources.train.empty()) {
    throw ConfigError("no training examples in " + cfg.paths.train_manifest);
  }

  auto pools = std::make_shared<Pools>(load_pools(manifest, cfg.augment));
  auto train_src =
      std::make_shared<std::vector<ExampleSource>>(std::move(sources.train));
  const AugmentSpec spec = cfg.augment;
  const FeatureConfig fcfg = cfg.feature;
  const bool augment_on = !pools->noise.empty();

  TrainDataset data;
  data.n_train = train_src->size();
  data.train = [train_src, pools, spec, fcfg, augment_on](
                   int epoch, std::size_t index) {
    const ExampleSource& src = (*train_src)[index];
    if (!augment_on) {
      return LabeledExample{featurize(src.clip, fcfg),
                            src.has_span ? 1 : 0};
    }
    Rng rng(Rng::derive(spec.rng_seed, static_cast<std::uint64_t>(epoch),
                        index));
    return make_training_example(src, spec, pools->noise, pools->rirs, fcfg,
                                 rng)
        .example;
  };

  std::vector<DevSource> dev_src = std::move(sources.split_dev);
  if (!cfg.paths.dev_manifest.empty()) {
    dev_src.clear();
    const Manifest dev_manifest = load_manifest(cfg.paths.dev_manifest);
    for (const auto& entry : dev_manifest.entries) {
      if (!entry.is_example()) continue;
      dev_src.push_back(
          {window_for_entry(entry, load_wav(entry.path), window_s),
           entry.is_positive() ? 1 : 0});
    }
  }
  if (dev_src.empty()) {
    for (const ExampleSource& src : *train_src) {
      dev_src.push_back({src, src.has_span ? 1 : 0});
    }
  }
  for (const DevSource& d : dev_src) {
    data.dev.push_back({featurize(d.src.clip, fcfg), d.label});
  }

  return train_loop(cfg.model, cfg.feature, cfg.train, data);
}

EvalSummary evaluate_from_manifest(const CliConfig& cfg,
                                   const Checkpoint& ckpt, int workers,
                                   double match_tol_s) {
  if (cfg.paths.eval_manifest.empty()) {
    throw ConfigError("paths.eval_manifest is not set");
  }
  const Manifest manifest = load_manifest(cfg.paths.eval_manifest);
  std::vector<const ManifestEntry*> files;
  for (const auto& entry : manifest.entries) {
    if (!entry.is_example()) continue;
    if (entry.is_positive() && !entry.has_span) {
      throw DataError("positive entry without span_s: " + entry.path);
    }
    files.push_back(&entry);
  }
  if (files.empty()) {
    throw DataError("no evaluation clips in " + cfg.paths.eval_manifest);
  }

  struct FileScore {
    std::vector<ScoredWindow> windows;
    bool too_short = false;
    double duration_s = 0.0;
  };
  const StreamConfig scfg = cfg.stream;
  auto scored =
      parallel_map(files.size(), workers, [&](std::size_t i) -> FileScore {
        const AudioClip clip = load_wav(files[i]->path);
        StreamResult result = stream_scores(clip, ckpt, scfg);
        return {std::move(result.windows), result.too_short,
                clip.duration_s()};
      });

  // One shared timeline; the gap keeps tolerance windows and refractory
  // periods from leaking across file boundaries.
  const double gap_s = 100.0;
  double base = 0.0;
  std::vector<ScoredWindow> windows;
  GroundTruth truth;
  EvalSummary summary;
  summary.n_files = static_cast<int>(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (scored[i].too_short) {
      ++summary.n_too_short;
      continue;
    }
    for (const ScoredWindow& w : scored[i].windows) {
      windows.push_back({w.end_s + base, w.score});
    }
    double span_len = 0.0;
    if (files[i]->is_positive()) {
      truth.spans.emplace_back(files[i]->span_begin_s + base,
                               files[i]->span_end_s + base);
      span_len = files[i]->span_end_s - files[i]->span_begin_s;
    }
    truth.total_negative_audio_s += scored[i].duration_s - span_len;
    base += scored[i].duration_s + gap_s;
  }
  truth.validate();
  summary.n_keywords = static_cast<int>(truth.spans.size());
  summary.negative_audio_s = truth.total_negative_audio_s;

  summary.at_threshold = match_detections(
      detect(windows, cfg.stream.threshold, cfg.stream.refractory_s), truth,
      match_tol_s);
  summary.det = det_curve(windows, truth, match_tol_s);
  summary.frr_at_fa1 = frr_at_target_fa(summary.det, 1.0);
  summary.frr_at_fa05 = frr_at_target_fa(summary.det, 0.5);
  return summary;
}

MiningResult mine_from_manifest(const CliConfig& cfg, const Checkpoint& ckpt,
                                int workers, int cap_per_file) {
  if (cfg.paths.mine_manifest.empty()) {
    throw ConfigError("paths.mine_manifest is not set");
  }
  const Manifest manifest = load_manifest(cfg.paths.mine_manifest);
  std::vector<std::string> paths;
  for (const auto& entry : manifest.entries) {
    if (entry.label == "negative") paths.push_back(entry.path);
  }
  if (paths.empty()) {
    throw DataError("no negative clips in " + cfg.paths.mine_manifest);
  }

  // Score in parallel up front; the serial collection pass then sees
  // identical inputs for any worker count. Unreadable files become empty
  // results and are reported as skipped, matching the serial behavior.
  using Scores = std::vector<std::pair<double, double>>;
  const StreamConfig scfg = cfg.stream;
  auto pre = parallel_map(
      paths.size(), workers,
      [&](std::size_t i) -> std::optional<Scores> {
        try {
          const AudioClip clip = load_wav(paths[i]);
          const StreamResult result = stream_scores(clip, ckpt, scfg);
          Scores scores;
          scores.reserve(result.windows.size());
          for (const ScoredWindow& w : result.windows) {
            scores.emplace_back(w.end_s, w.score);
          }
          return scores;
        } catch (const Error&) {
          return std::nullopt;
        }
      });

  std::map<std::string, const std::optional<Scores>*> by_path;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    by_path.emplace(paths[i], &pre[i]);
  }
  const WindowScorer scorer = [&by_path](const std::string& path) -> Scores {
    const std::optional<Scores>& scores = *by_path.at(path);
    if (!scores) throw IoError("unreadable: " + path);
    return *scores;
  };
  return mine_hard_negatives(scorer, paths, cfg.stream.threshold,
                             cap_per_file, cfg.stream.window_s);
}

std::vector<ManifestEntry> mined_to_entries(const MiningResult& mined) {
  std::vector<ManifestEntry> entries;
  entries.reserve(mined.mined.size());
  for (const MinedWindow& w : mined.mined) {
    ManifestEntry entry;
    entry.path = w.path;
    entry.label = "negative";
    entry.has_offset = true;
    entry.offset_s = w.offset_s;
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<AugmentRow> materialize_augmented(const CliConfig& cfg, int count,
                                              const std::string& out_dir,
                                              int workers) {
  if (count <= 0) throw ConfigError("augmented example count must be > 0");
  if (cfg.paths.train_manifest.empty()) {
    throw ConfigError("paths.train_manifest is not set");
  }
  const Manifest manifest = load_manifest(cfg.paths.train_manifest);
  const Pools pools = load_pools(manifest, cfg.augment);
  if (pools.noise.empty()) {
    throw ConfigError("no noise pool entries in " + cfg.paths.train_manifest);
  }
  TrainSources sources =
      collect_train_sources(manifest, cfg.stream.window_s);
  if (sources.train.empty()) {
    throw ConfigError("no training examples in " + cfg.paths.train_manifest);
  }
  std::filesystem::create_directories(out_dir);

  return parallel_map(
      static_cast<std::size_t>(count), workers, [&](std::size_t i) {
        const ExampleSource& src = sources.train[i % sources.train.size()];
        Rng rng(Rng::derive(cfg.augment.rng_seed, i));
        const AugmentedExample aug = make_training_example(
            src, cfg.augment, pools.noise, pools.rirs, cfg.feature, rng);
        char name[32];
        std::snprintf(name, sizeof(name), "aug_%05zu.fmat", i);
        const std::string path =
            (std::filesystem::path(out_dir) / name).string();
        save_fmat(path, aug.example.features);
        return AugmentRow{path, aug.example.label, aug.snr_db,
                          aug.realized_snr_db, aug.jitter_ms};
      });
}

void write_augment_csv(const std::string& path,
                       const std::vector<AugmentRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  out << "path,label,snr_db,realized_snr_db,jitter_ms\n";
  char buf[96];
  for (const AugmentRow& row : rows) {
    std::snprintf(buf, sizeof(buf), ",%d,%.10g,%.10g,%.10g\n", row.label,
                  row.snr_db, row.realized_snr_db, row.jitter_ms);
    out << row.path << buf;
  }
  if (!out) throw IoError("cannot write: " + path);
}

}  // namespace kws
