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

#include "kws/config.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kws/errors.hpp"
#include "kws/json_conv.hpp"

namespace kws {

namespace {

using nlohmann::json;

std::uint64_t get_u64(const json& j, const char* key, std::uint64_t def,
                      const char* what) {
  if (!j.contains(key)) return def;
  const json& v = j[key];
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw ConfigError(std::string(what) + "." + key +
                      " must be a nonnegative integer");
  }
  if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
    throw ConfigError(std::string(what) + "." + key +
                      " must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

void CliConfig::validate() const {
  feature.validate();
  model.validate();
  train.validate();
  augment.validate();
  stream.validate();
  align.validate();
}

json to_json(const TrainConfig& cfg) {
  json j;
  j["batch_size"] = cfg.batch_size;
  j["lr_initial"] = cfg.lr_initial;
  j["lr_final"] = cfg.lr_final;
  j["lr_drop_patience"] = cfg.lr_drop_patience;
  j["adam_beta1"] = cfg.adam_beta1;
  j["adam_beta2"] = cfg.adam_beta2;
  j["adam_eps"] = cfg.adam_eps;
  j["max_epochs"] = cfg.max_epochs;
  j["seed"] = cfg.seed;
  j["early_stop_ce"] = cfg.early_stop_ce;
  return j;
}

TrainConfig train_config_from_json(const json& j) {
  expect_object(j, "train");
  expect_known_keys(j,
                    {"batch_size", "lr_initial", "lr_final",
                     "lr_drop_patience", "adam_beta1", "adam_beta2",
                     "adam_eps", "max_epochs", "seed", "early_stop_ce"},
                    "train");
  TrainConfig cfg;
  cfg.batch_size = get_int(j, "batch_size", cfg.batch_size, "train");
  cfg.lr_initial = get_double(j, "lr_initial", cfg.lr_initial, "train");
  cfg.lr_final = get_double(j, "lr_final", cfg.lr_final, "train");
  cfg.lr_drop_patience =
      get_int(j, "lr_drop_patience", cfg.lr_drop_patience, "train");
  cfg.adam_beta1 = get_double(j, "adam_beta1", cfg.adam_beta1, "train");
  cfg.adam_beta2 = get_double(j, "adam_beta2", cfg.adam_beta2, "train");
  cfg.adam_eps = get_double(j, "adam_eps", cfg.adam_eps, "train");
  cfg.max_epochs = get_int(j, "max_epochs", cfg.max_epochs, "train");
  cfg.seed = get_u64(j, "seed", cfg.seed, "train");
  cfg.early_stop_ce =
      get_double(j, "early_stop_ce", cfg.early_stop_ce, "train");
  return cfg;
}

json to_json(const AugmentSpec& cfg) {
  json j;
  j["snr_db_range"] = {cfg.snr_db_low, cfg.snr_db_high};
  j["jitter_max_ms"] = cfg.jitter_max_ms;
  j["rir_paths"] = cfg.rir_paths;
  j["rng_seed"] = cfg.rng_seed;
  return j;
}

AugmentSpec augment_spec_from_json(const json& j) {
  expect_object(j, "augment");
  expect_known_keys(
      j, {"snr_db_range", "jitter_max_ms", "rir_paths", "rng_seed"},
      "augment");
  AugmentSpec cfg;
  if (j.contains("snr_db_range")) {
    const json& r = j["snr_db_range"];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() ||
        !r[1].is_number()) {
      throw ConfigError("augment.snr_db_range must be [low, high]");
    }
    cfg.snr_db_low = r[0].get<double>();
    cfg.snr_db_high = r[1].get<double>();
  }
  cfg.jitter_max_ms =
      get_double(j, "jitter_max_ms", cfg.jitter_max_ms, "augment");
  if (j.contains("rir_paths")) {
    const json& paths = j["rir_paths"];
    if (!paths.is_array()) {
      throw ConfigError("augment.rir_paths must be an array of strings");
    }
    for (const json& p : paths) {
      if (!p.is_string()) {
        throw ConfigError("augment.rir_paths must be an array of strings");
      }
      cfg.rir_paths.push_back(p.get<std::string>());
    }
  }
  cfg.rng_seed = get_u64(j, "rng_seed", cfg.rng_seed, "augment");
  return cfg;
}

json to_json(const StreamConfig& cfg) {
  json j;
  j["window_s"] = cfg.window_s;
  j["hop_s"] = cfg.hop_s;
  j["threshold"] = cfg.threshold;
  j["refractory_s"] = cfg.refractory_s;
  return j;
}

StreamConfig stream_config_from_json(const json& j) {
  expect_object(j, "stream");
  expect_known_keys(j, {"window_s", "hop_s", "threshold", "refractory_s"},
                    "stream");
  StreamConfig cfg;
  cfg.window_s = get_double(j, "window_s", cfg.window_s, "stream");
  cfg.hop_s = get_double(j, "hop_s", cfg.hop_s, "stream");
  cfg.threshold = get_double(j, "threshold", cfg.threshold, "stream");
  cfg.refractory_s =
      get_double(j, "refractory_s", cfg.refractory_s, "stream");
  return cfg;
}

json to_json(const AlignConfig& cfg) {
  json j;
  j["alpha"] = cfg.alpha;
  j["n_iter"] = cfg.n_iter;
  j["smooth_window"] = cfg.smooth_window;
  j["pad_s"] = cfg.pad_s;
  return j;
}

AlignConfig align_config_from_json(const json& j) {
  expect_object(j, "align");
  expect_known_keys(j, {"alpha", "n_iter", "smooth_window", "pad_s"},
                    "align");
  AlignConfig cfg;
  cfg.alpha = get_double(j, "alpha", cfg.alpha, "align");
  cfg.n_iter = get_int(j, "n_iter", cfg.n_iter, "align");
  cfg.smooth_window =
      get_int(j, "smooth_window", cfg.smooth_window, "align");
  cfg.pad_s = get_double(j, "pad_s", cfg.pad_s, "align");
  return cfg;
}

json to_json(const PathsConfig& cfg) {
  json j;
  j["train_manifest"] = cfg.train_manifest;
  j["dev_manifest"] = cfg.dev_manifest;
  j["eval_manifest"] = cfg.eval_manifest;
  j["mine_manifest"] = cfg.mine_manifest;
  j["checkpoint"] = cfg.checkpoint;
  j["out_dir"] = cfg.out_dir;
  return j;
}

PathsConfig paths_config_from_json(const json& j) {
  expect_object(j, "paths");
  expect_known_keys(j,
                    {"train_manifest", "dev_manifest", "eval_manifest",
                     "mine_manifest", "checkpoint", "out_dir"},
                    "paths");
  PathsConfig cfg;
  cfg.train_manifest =
      get_string(j, "train_manifest", cfg.train_manifest, "paths");
  cfg.dev_manifest = get_string(j, "dev_manifest", cfg.dev_manifest, "paths");
  cfg.eval_manifest =
      get_string(j, "eval_manifest", cfg.eval_manifest, "paths");
  cfg.mine_manifest =
      get_string(j, "mine_manifest", cfg.mine_manifest, "paths");
  cfg.checkpoint = get_string(j, "checkpoint", cfg.checkpoint, "paths");
  cfg.out_dir = get_string(j, "out_dir", cfg.out_dir, "paths");
  return cfg;
}

json to_json(const CliConfig& cfg) {
  json j;
  j["feature"] = to_json(cfg.feature);
  j["model"] = to_json(cfg.model);
  j["train"] = to_json(cfg.train);
  j["augment"] = to_json(cfg.augment);
  j["stream"] = to_json(cfg.stream);
  j["align"] = to_json(cfg.align);
  j["paths"] = to_json(cfg.paths);
  return j;
}

CliConfig cli_config_from_json(const json& j) {
  expect_object(j, "config");
  expect_known_keys(
      j, {"feature", "model", "train", "augment", "stream", "align", "paths"},
      "config");
  CliConfig cfg;
  if (j.contains("feature")) {
    cfg.feature = feature_config_from_json(j["feature"]);
  }
  if (j.contains("model")) cfg.model = model_config_from_json(j["model"]);
  if (j.contains("train")) cfg.train = train_config_from_json(j["train"]);
  if (j.contains("augment")) {
    cfg.augment = augment_spec_from_json(j["augment"]);
  }
  if (j.contains("stream")) cfg.stream = stream_config_from_json(j["stream"]);
  if (j.contains("align")) cfg.align = align_config_from_json(j["align"]);
  if (j.contains("paths")) cfg.paths = paths_config_from_json(j["paths"]);
  return cfg;
}

CliConfig load_cli_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& err) {
    throw ConfigError("config " + path + ": " + err.what());
  }
  CliConfig cfg = cli_config_from_json(j);
  cfg.validate();

  // Relative paths in the file are meant relative to the file itself, so a
  // config plus its data directory can be moved or used from anywhere.
  namespace fs = std::filesystem;
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&base](std::string* p) {
    if (!p->empty() && fs::path(*p).is_relative()) {
      *p = (base / *p).string();
    }
  };
  resolve(&cfg.paths.train_manifest);
  resolve(&cfg.paths.dev_manifest);
  resolve(&cfg.paths.eval_manifest);
  resolve(&cfg.paths.mine_manifest);
  resolve(&cfg.paths.checkpoint);
  resolve(&cfg.paths.out_dir);
  for (auto& p : cfg.augment.rir_paths) resolve(&p);
  return cfg;
}

}  // namespace kws
