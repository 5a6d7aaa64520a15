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
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "kws/config.hpp"
#include "kws/errors.hpp"
#include "kws/json_conv.hpp"

namespace {

using namespace kws;
using nlohmann::json;
namespace fs = std::filesystem;

fs::path tmp_dir() {
  const fs::path dir = fs::temp_directory_path() / "kws_config_test";
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const char* name, const std::string& body) {
  const fs::path path = tmp_dir() / name;
  std::ofstream out(path);
  out << body;
  out.close();
  return path.string();
}

}  // namespace

TEST_CASE("an empty json object is a complete config") {
  const CliConfig cfg = load_cli_config(write_config("empty.json", "{}"));
  CHECK(cfg.model.n_conv_filters == 32);
  CHECK(cfg.model.rec_hidden == 32);
  CHECK(cfg.feature.n_mels == 40);
  CHECK(cfg.train.batch_size == 64);
  CHECK(cfg.stream.window_s == 1.5);
  CHECK(cfg.align.alpha == 0.5);
  CHECK(cfg.augment.snr_db_low == -5.0);
  CHECK(cfg.augment.snr_db_high == 15.0);
  CHECK(cfg.paths.train_manifest.empty());
}

TEST_CASE("config round trips through json") {
  CliConfig cfg;
  cfg.model.n_conv_filters = 12;
  cfg.model.cell_kind = CellKind::kLstm;
  cfg.model.rec_candidate_activation = RnnActivation::kTanh;
  cfg.feature.n_mels = 30;
  cfg.train.batch_size = 16;
  cfg.train.lr_initial = 0.005;
  cfg.train.early_stop_ce = 0.01;
  cfg.augment.snr_db_low = 0.0;
  cfg.augment.snr_db_high = 20.0;
  cfg.augment.jitter_max_ms = 25.0;
  cfg.augment.rir_paths = {"a.wav", "b.wav"};
  cfg.stream.hop_s = 0.05;
  cfg.align.n_iter = 3;
  cfg.paths.checkpoint = "model.ckws";

  const CliConfig back = cli_config_from_json(to_json(cfg));
  CHECK(back.model.n_conv_filters == 12);
  CHECK(back.model.cell_kind == CellKind::kLstm);
  CHECK(back.model.rec_candidate_activation == RnnActivation::kTanh);
  CHECK(back.feature.n_mels == 30);
  CHECK(back.train.batch_size == 16);
  CHECK(back.train.lr_initial == 0.005);
  CHECK(back.train.early_stop_ce == 0.01);
  CHECK(back.augment.snr_db_low == 0.0);
  CHECK(back.augment.snr_db_high == 20.0);
  CHECK(back.augment.jitter_max_ms == 25.0);
  REQUIRE(back.augment.rir_paths.size() == 2);
  CHECK(back.augment.rir_paths[1] == "b.wav");
  CHECK(back.stream.hop_s == 0.05);
  CHECK(back.align.n_iter == 3);
  CHECK(back.paths.checkpoint == "model.ckws");
}

TEST_CASE("unknown keys are rejected in every section") {
  auto rejects = [](const std::string& body) {
    const std::string path = write_config("bad.json", body);
    CHECK_THROWS_AS(load_cli_config(path), ConfigError);
  };
  rejects("{\"modle\": {}}");
  rejects("{\"model\": {\"nconv\": 3}}");
  rejects("{\"feature\": {\"mels\": 40}}");
  rejects("{\"train\": {\"batchsize\": 8}}");
  rejects("{\"augment\": {\"snr\": [0, 10]}}");
  rejects("{\"stream\": {\"window\": 1.5}}");
  rejects("{\"align\": {\"a\": 0.5}}");
  rejects("{\"paths\": {\"ckpt\": \"x\"}}");
}

TEST_CASE("malformed config values raise config errors") {
  auto rejects = [](const char* name, const std::string& body) {
    CHECK_THROWS_AS(load_cli_config(write_config(name, body)), ConfigError);
  };
  rejects("parse.json", "{");
  rejects("top.json", "[1, 2]");
  rejects("snr_shape.json", "{\"augment\": {\"snr_db_range\": [1]}}");
  rejects("snr_order.json", "{\"augment\": {\"snr_db_range\": [10, -10]}}");
  rejects("jitter.json", "{\"augment\": {\"jitter_max_ms\": -1}}");
  rejects("cell.json", "{\"model\": {\"cell_kind\": \"rnn\"}}");
  rejects("act.json",
          "{\"model\": {\"rec_candidate_activation\": \"sigmoid\"}}");
  rejects("hop.json", "{\"stream\": {\"hop_s\": 0}}");
  rejects("hop_big.json", "{\"stream\": {\"hop_s\": 2.0}}");
  rejects("thr.json", "{\"stream\": {\"threshold\": 1.5}}");
  rejects("alpha.json", "{\"align\": {\"alpha\": 1.5}}");
  rejects("smooth.json", "{\"align\": {\"smooth_window\": 4}}");
  rejects("neg_seed.json", "{\"augment\": {\"rng_seed\": -1}}");
  rejects("type.json", "{\"model\": {\"n_conv_filters\": \"many\"}}");
}

TEST_CASE("missing config file raises an io error") {
  CHECK_THROWS_AS(load_cli_config((tmp_dir() / "absent.json").string()),
                  IoError);
}

TEST_CASE("relative paths resolve against the config directory") {
  const fs::path sub = tmp_dir() / "nested";
  fs::create_directories(sub);
  const fs::path path = sub / "cfg.json";
  std::ofstream out(path);
  out << "{\"paths\": {\"train_manifest\": \"train.jsonl\","
         " \"checkpoint\": \"/abs/model.ckws\", \"out_dir\": \"out\"},"
         " \"augment\": {\"rir_paths\": [\"rirs/room.wav\"]}}";
  out.close();

  const CliConfig cfg = load_cli_config(path.string());
  CHECK(cfg.paths.train_manifest == (sub / "train.jsonl").string());
  CHECK(cfg.paths.checkpoint == "/abs/model.ckws");
  CHECK(cfg.paths.out_dir == (sub / "out").string());
  REQUIRE(cfg.augment.rir_paths.size() == 1);
  CHECK(cfg.augment.rir_paths[0] == (sub / "rirs/room.wav").string());
  CHECK(cfg.paths.dev_manifest.empty());  // unset stays unset
}

TEST_CASE("json emitter writes the snr range as a pair") {
  AugmentSpec spec;
  spec.snr_db_low = 2.0;
  spec.snr_db_high = 9.0;
  const json j = to_json(spec);
  REQUIRE(j.contains("snr_db_range"));
  CHECK(j["snr_db_range"][0] == 2.0);
  CHECK(j["snr_db_range"][1] == 9.0);
}

TEST_CASE("feature config json covers the frontend mode") {
  FeatureConfig cfg;
  cfg.mode = FrontendMode::kLogMel;
  const FeatureConfig back = feature_config_from_json(to_json(cfg));
  CHECK(back.mode == FrontendMode::kLogMel);
  CHECK_THROWS_AS(
      feature_config_from_json(json::parse("{\"mode\": \"mfcc\"}")),
      ConfigError);
}
