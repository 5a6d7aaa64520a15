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

#ifndef KWS_CONFIG_HPP_
#define KWS_CONFIG_HPP_

#include <string>

#include "json.hpp"
#include "kws/align.hpp"
#include "kws/augment.hpp"
#include "kws/features.hpp"
#include "kws/model.hpp"
#include "kws/streameval.hpp"
#include "kws/train.hpp"

namespace kws {

// File locations used by the command-line pipeline. load_cli_config turns
// relative paths into paths relative to the config file; empty strings mean
// "not set" and each command checks for the paths it needs.
struct PathsConfig {
  std::string train_manifest;
  std::string dev_manifest;  // empty: dev reuses the train examples
  std::string eval_manifest;
  std::string mine_manifest;
  std::string checkpoint;
  std::string out_dir;
};

// Full pipeline configuration. Every section is optional in the JSON file
// and defaults match the struct initializers, so an empty object is a valid
// config; unknown keys anywhere are rejected.
struct CliConfig {
  FeatureConfig feature;
  ModelConfig model;
  TrainConfig train;
  AugmentSpec augment;
  StreamConfig stream;
  AlignConfig align;
  PathsConfig paths;

  void validate() const;
};

nlohmann::json to_json(const TrainConfig& cfg);
nlohmann::json to_json(const AugmentSpec& cfg);
nlohmann::json to_json(const StreamConfig& cfg);
nlohmann::json to_json(const AlignConfig& cfg);
nlohmann::json to_json(const PathsConfig& cfg);
nlohmann::json to_json(const CliConfig& cfg);

TrainConfig train_config_from_json(const nlohmann::json& j);
AugmentSpec augment_spec_from_json(const nlohmann::json& j);
StreamConfig stream_config_from_json(const nlohmann::json& j);
AlignConfig align_config_from_json(const nlohmann::json& j);
PathsConfig paths_config_from_json(const nlohmann::json& j);
CliConfig cli_config_from_json(const nlohmann::json& j);

// Reads and parses a JSON config file. Throws IoError when the file cannot
// be read and ConfigError on parse or validation failures.
CliConfig load_cli_config(const std::string& path);

}  // namespace kws

#endif  // KWS_CONFIG_HPP_
