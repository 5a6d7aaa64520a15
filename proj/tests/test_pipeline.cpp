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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <atomic>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "kws/config.hpp"
#include "kws/errors.hpp"
#include "kws/pipeline.hpp"
#include "kws/synth.hpp"
#include "kws/threadpool.hpp"

namespace {

using namespace kws;
namespace fs = std::filesystem;

AudioClip const_clip(double duration_s, float value = 0.25f) {
  AudioClip clip;
  clip.samples.assign(static_cast<std::size_t>(duration_s * 16000.0), value);
  return clip;
}

ManifestEntry positive_entry(double begin_s, double end_s) {
  ManifestEntry e;
  e.path = "p.wav";
  e.label = "positive";
  e.has_span = true;
  e.span_begin_s = begin_s;
  e.span_end_s = end_s;
  return e;
}

// Toy fixture shared by the manifest-driven cases; written once.
struct ToyFixture {
  std::string dir;
  ToyDataset paths;
  CliConfig cfg;
  Checkpoint ckpt;

  ToyFixture() {
    dir = (fs::temp_directory_path() / "kws_pipeline_toy").string();
    fs::remove_all(dir);
    paths = write_toy_dataset(dir, 7);
    cfg = load_cli_config(paths.config);
    ckpt.config = cfg.model;
    ckpt.feature = cfg.feature;
    Rng rng(99);
    ckpt.weights = init_weights(cfg.model, rng);
  }
};

const ToyFixture& toy() {
  static ToyFixture fixture;
  return fixture;
}

}  // namespace

TEST_CASE("parallel map preserves index order for any worker count") {
  for (int workers : {1, 2, 3, 8}) {
    const auto out = parallel_map(
        100, workers, [](std::size_t i) { return static_cast<int>(i) * 3; });
    REQUIRE(out.size() == 100);
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out[i] == static_cast<int>(i) * 3);
    }
  }
}

TEST_CASE("parallel map propagates the worker exception") {
  CHECK_THROWS_AS(parallel_map(50, 4,
                               [](std::size_t i) {
                                 if (i == 33) throw DataError("boom");
                                 return i;
                               }),
                  DataError);
}

TEST_CASE("parallel map runs every job exactly once") {
  std::atomic<int> calls{0};
  const auto out = parallel_map(64, 5, [&calls](std::size_t i) {
    calls.fetch_add(1);
    return i;
  });
  CHECK(calls.load() == 64);
  CHECK(out.size() == 64);
}

TEST_CASE("window for an offset entry starts at the offset") {
  ManifestEntry e;
  e.path = "n.wav";
  e.label = "negative";
  e.has_offset = true;
  e.offset_s = 2.0;
  AudioClip clip = const_clip(5.0);
  clip.samples[static_cast<std::size_t>(2.0 * 16000)] = 0.9f;

  const ExampleSource src = window_for_entry(e, clip, 1.5);
  CHECK(src.clip.samples.size() == 24000);
  CHECK(src.clip.samples[0] == 0.9f);
  CHECK_FALSE(src.has_span);
}

TEST_CASE("window for a span entry centers the keyword") {
  const ManifestEntry e = positive_entry(2.0, 2.8);
  const AudioClip clip = const_clip(5.0);
  const ExampleSource src = window_for_entry(e, clip, 1.5);
  CHECK(src.clip.samples.size() == 24000);
  REQUIRE(src.has_span);
  // Window is centered on the span center 2.4: [1.65, 3.15], so the
  // window-relative span is [0.35, 1.15].
  CHECK(src.span_begin_s == doctest::Approx(0.35).epsilon(1e-9));
  CHECK(src.span_end_s == doctest::Approx(1.15).epsilon(1e-9));
}

TEST_CASE("window centering clamps at the clip edges") {
  SUBCASE("late span") {
    const ManifestEntry e = positive_entry(4.4, 4.9);
    const ExampleSource src = window_for_entry(e, const_clip(5.0), 1.5);
    REQUIRE(src.has_span);
    // Window clamps to [3.5, 5.0]; span becomes [0.9, 1.4].
    CHECK(src.span_begin_s == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(src.span_end_s == doctest::Approx(1.4).epsilon(1e-9));
  }
  SUBCASE("early span") {
    const ManifestEntry e = positive_entry(0.0, 0.4);
    const ExampleSource src = window_for_entry(e, const_clip(5.0), 1.5);
    REQUIRE(src.has_span);
    CHECK(src.span_begin_s == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(src.span_end_s == doctest::Approx(0.4).epsilon(1e-9));
  }
}

TEST_CASE("short clips are zero padded to the window length") {
  ManifestEntry e;
  e.path = "n.wav";
  e.label = "negative";
  const ExampleSource src = window_for_entry(e, const_clip(1.0), 1.5);
  REQUIRE(src.clip.samples.size() == 24000);
  CHECK(src.clip.samples[15999] == 0.25f);
  CHECK(src.clip.samples[16000] == 0.0f);
  CHECK(src.clip.samples[23999] == 0.0f);
}

TEST_CASE("a span that cannot fit inside the window drops the label") {
  // 2.0 s keyword cannot sit inside a 1.5 s window; treating the window as
  // positive would teach the model that fragments count.
  const ManifestEntry e = positive_entry(1.0, 3.0);
  const ExampleSource src = window_for_entry(e, const_clip(5.0), 1.5);
  CHECK(src.clip.samples.size() == 24000);
  CHECK_FALSE(src.has_span);
}

TEST_CASE("toy eval manifest arithmetic is exact") {
  const ToyFixture& fix = toy();
  const EvalSummary s = evaluate_from_manifest(fix.cfg, fix.ckpt, 2);
  CHECK(s.n_files == 8);
  CHECK(s.n_too_short == 0);
  CHECK(s.n_keywords == 4);
  // 8 clips x 3.5 s minus 4 keyword spans x 0.8 s.
  CHECK(s.negative_audio_s == doctest::Approx(24.8).epsilon(1e-9));
  CHECK(s.at_threshold.hits + s.at_threshold.misses == 4);
}

TEST_CASE("evaluation does not depend on the worker count") {
  const ToyFixture& fix = toy();
  const EvalSummary a = evaluate_from_manifest(fix.cfg, fix.ckpt, 1);
  const EvalSummary b = evaluate_from_manifest(fix.cfg, fix.ckpt, 4);
  CHECK(a.at_threshold.hits == b.at_threshold.hits);
  CHECK(a.at_threshold.false_alarms == b.at_threshold.false_alarms);
  CHECK(a.frr_at_fa1 == b.frr_at_fa1);
  REQUIRE(a.det.points.size() == b.det.points.size());
  for (std::size_t i = 0; i < a.det.points.size(); ++i) {
    CHECK(a.det.points[i].threshold == b.det.points[i].threshold);
    CHECK(a.det.points[i].fa_per_hour == b.det.points[i].fa_per_hour);
    CHECK(a.det.points[i].frr_percent == b.det.points[i].frr_percent);
  }
}

TEST_CASE("mining does not depend on the worker count") {
  const ToyFixture& fix = toy();
  CliConfig cfg = fix.cfg;
  cfg.paths.mine_manifest = fix.paths.eval_manifest;
  cfg.stream.threshold = 0.0;  // collect everything; ordering must agree

  const MiningResult a = mine_from_manifest(cfg, fix.ckpt, 1, 5);
  const MiningResult b = mine_from_manifest(cfg, fix.ckpt, 4, 5);
  CHECK(a.files_skipped == 0);
  CHECK(b.files_skipped == 0);
  REQUIRE(a.mined.size() == b.mined.size());
  CHECK(a.mined.size() > 0);
  for (std::size_t i = 0; i < a.mined.size(); ++i) {
    CHECK(a.mined[i].path == b.mined[i].path);
    CHECK(a.mined[i].offset_s == b.mined[i].offset_s);
    CHECK(a.mined[i].score == b.mined[i].score);
  }

  const std::vector<ManifestEntry> entries = mined_to_entries(a);
  REQUIRE(entries.size() == a.mined.size());
  CHECK(entries[0].label == "negative");
  CHECK(entries[0].has_offset);
  CHECK(entries[0].offset_s == a.mined[0].offset_s);
}

TEST_CASE("augment materialization does not depend on the worker count") {
  const ToyFixture& fix = toy();
  const std::string out_a = fix.dir + "/aug_a";
  const std::string out_b = fix.dir + "/aug_b";
  fs::create_directories(out_a);
  fs::create_directories(out_b);

  const auto rows_a = materialize_augmented(fix.cfg, 12, out_a, 1);
  const auto rows_b = materialize_augmented(fix.cfg, 12, out_b, 4);
  REQUIRE(rows_a.size() == 12);
  REQUIRE(rows_b.size() == 12);
  for (std::size_t i = 0; i < rows_a.size(); ++i) {
    CHECK(rows_a[i].label == rows_b[i].label);
    CHECK(rows_a[i].snr_db == rows_b[i].snr_db);
    CHECK(rows_a[i].realized_snr_db == rows_b[i].realized_snr_db);
    CHECK(rows_a[i].jitter_ms == rows_b[i].jitter_ms);
    const FeatureMatrix fa = load_fmat(rows_a[i].path);
    const FeatureMatrix fb = load_fmat(rows_b[i].path);
    REQUIRE(fa.values.data.size() == fb.values.data.size());
    for (std::size_t k = 0; k < fa.values.data.size(); ++k) {
      CHECK(fa.values.data[k] == fb.values.data[k]);
    }
  }
  // SNR draws honor the configured range.
  for (const auto& row : rows_a) {
    CHECK(row.snr_db >= fix.cfg.augment.snr_db_low);
    CHECK(row.snr_db < fix.cfg.augment.snr_db_high);
    CHECK(std::fabs(row.realized_snr_db - row.snr_db) < 0.05);
  }
}

TEST_CASE("train pipeline rejects unusable manifests") {
  const ToyFixture& fix = toy();

  SUBCASE("no train manifest configured") {
    CliConfig cfg = fix.cfg;
    cfg.paths.train_manifest.clear();
    CHECK_THROWS_AS(train_from_manifest(cfg), ConfigError);
  }
  SUBCASE("positive example without a span") {
    const std::string dir = fix.dir + "/nospan";
    fs::create_directories(dir);
    ManifestEntry e;
    e.path = "../pos_00.wav";  // reuse toy audio
    e.label = "positive";
    save_manifest(dir + "/train.jsonl", {e});
    CliConfig cfg = fix.cfg;
    cfg.paths.train_manifest = dir + "/train.jsonl";
    cfg.train.max_epochs = 1;
    CHECK_THROWS_AS(train_from_manifest(cfg), DataError);
  }
  SUBCASE("manifest with only pool entries") {
    const std::string dir = fix.dir + "/poolonly";
    fs::create_directories(dir);
    ManifestEntry e;
    e.path = "../pool_noise_00.wav";
    e.kind = "noise";
    save_manifest(dir + "/train.jsonl", {e});
    CliConfig cfg = fix.cfg;
    cfg.paths.train_manifest = dir + "/train.jsonl";
    CHECK_THROWS_AS(train_from_manifest(cfg), ConfigError);
  }
}

TEST_CASE("materialize rejects a manifest without a noise pool") {
  const ToyFixture& fix = toy();
  const std::string dir = fix.dir + "/nonoise";
  fs::create_directories(dir);
  ManifestEntry e = positive_entry(0.3, 1.1);
  e.path = "../pos_00.wav";
  save_manifest(dir + "/train.jsonl", {e});
  CliConfig cfg = fix.cfg;
  cfg.paths.train_manifest = dir + "/train.jsonl";
  CHECK_THROWS_AS(materialize_augmented(cfg, 4, dir, 1), ConfigError);
}

TEST_CASE("augment csv lists one row per materialized example") {
  const ToyFixture& fix = toy();
  const std::string dir = fix.dir + "/csv";
  fs::create_directories(dir);
  const auto rows = materialize_augmented(fix.cfg, 3, dir, 2);
  const std::string csv = dir + "/augmented.csv";
  write_augment_csv(csv, rows);

  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "path,label,snr_db,realized_snr_db,jitter_ms");
  int count = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++count;
  }
  CHECK(count == 3);
}
