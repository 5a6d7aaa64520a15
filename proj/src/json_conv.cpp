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

#include "kws/json_conv.hpp"

#include <string>

#include "kws/errors.hpp"

namespace kws {

using nlohmann::json;

void expect_object(const json& j, const char* what) {
  if (!j.is_object()) {
    throw ConfigError(std::string(what) + ": expected a JSON object");
  }
}

void expect_known_keys(const json& j, std::initializer_list<const char*> keys,
                       const char* what) {
  expect_object(j, what);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError(std::string(what) + ": unknown key \"" + it.key() +
                        "\"");
    }
  }
}

int get_int(const json& j, const char* key, int def, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_number_integer()) {
    throw ConfigError(std::string(what) + ": \"" + key +
                      "\" must be an integer");
  }
  return it->get<int>();
}

double get_double(const json& j, const char* key, double def,
                  const char* what) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_number()) {
    throw ConfigError(std::string(what) + ": \"" + key + "\" must be a number");
  }
  return it->get<double>();
}

std::string get_string(const json& j, const char* key, const std::string& def,
                       const char* what) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_string()) {
    throw ConfigError(std::string(what) + ": \"" + key + "\" must be a string");
  }
  return it->get<std::string>();
}

bool get_bool(const json& j, const char* key, bool def, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_boolean()) {
    throw ConfigError(std::string(what) + ": \"" + key +
                      "\" must be a boolean");
  }
  return it->get<bool>();
}

const char* to_string(FrontendMode mode) {
  return mode == FrontendMode::kPcen ? "pcen" : "logmel";
}

FrontendMode parse_frontend_mode(const std::string& s) {
  if (s == "pcen") return FrontendMode::kPcen;
  if (s == "logmel") return FrontendMode::kLogMel;
  throw ConfigError("unknown frontend mode \"" + s + "\"");
}

json to_json(const PcenConfig& cfg) {
  return json{{"smoother", cfg.smoother},
              {"alpha", cfg.alpha},
              {"delta", cfg.delta},
              {"root", cfg.root},
              {"floor", cfg.floor}};
}

PcenConfig pcen_config_from_json(const json& j) {
  const char* what = "pcen config";
  expect_known_keys(j, {"smoother", "alpha", "delta", "root", "floor"}, what);
  PcenConfig cfg;
  cfg.smoother = get_double(j, "smoother", cfg.smoother, what);
  cfg.alpha = get_double(j, "alpha", cfg.alpha, what);
  cfg.delta = get_double(j, "delta", cfg.delta, what);
  cfg.root = get_double(j, "root", cfg.root, what);
  cfg.floor = get_double(j, "floor", cfg.floor, what);
  return cfg;
}

json to_json(const FeatureConfig& cfg) {
  return json{{"sample_rate", cfg.sample_rate},
              {"window_ms", cfg.window_ms},
              {"hop_ms", cfg.hop_ms},
              {"fft_size", cfg.fft_size},
              {"n_mels", cfg.n_mels},
              {"fmin", cfg.fmin},
              {"fmax", cfg.fmax},
              {"pcen", to_json(cfg.pcen)},
              {"mode", to_string(cfg.mode)}};
}

FeatureConfig feature_config_from_json(const json& j) {
  const char* what = "feature config";
  expect_known_keys(j,
                    {"sample_rate", "window_ms", "hop_ms", "fft_size", "n_mels",
                     "fmin", "fmax", "pcen", "mode"},
                    what);
  FeatureConfig cfg;
  cfg.sample_rate = get_int(j, "sample_rate", cfg.sample_rate, what);
  cfg.window_ms = get_double(j, "window_ms", cfg.window_ms, what);
  cfg.hop_ms = get_double(j, "hop_ms", cfg.hop_ms, what);
  cfg.fft_size = get_int(j, "fft_size", cfg.fft_size, what);
  cfg.n_mels = get_int(j, "n_mels", cfg.n_mels, what);
  cfg.fmin = get_double(j, "fmin", cfg.fmin, what);
  cfg.fmax = get_double(j, "fmax", cfg.fmax, what);
  if (j.contains("pcen")) cfg.pcen = pcen_config_from_json(j.at("pcen"));
  cfg.mode = parse_frontend_mode(get_string(j, "mode", "pcen", what));
  return cfg;
}

json to_json(const ModelConfig& cfg) {
  return json{{"n_conv_filters", cfg.n_conv_filters},
              {"kernel_time", cfg.kernel_time},
              {"kernel_freq", cfg.kernel_freq},
              {"stride_time", cfg.stride_time},
              {"stride_freq", cfg.stride_freq},
              {"n_rec_layers", cfg.n_rec_layers},
              {"rec_hidden", cfg.rec_hidden},
              {"cell_kind", to_string(cfg.cell_kind)},
              {"fc_units", cfg.fc_units},
              {"rec_candidate_activation",
               to_string(cfg.rec_candidate_activation)},
              {"input_mels", cfg.input_mels},
              {"input_frames", cfg.input_frames}};
}

ModelConfig model_config_from_json(const json& j) {
  const char* what = "model config";
  expect_known_keys(
      j,
      {"n_conv_filters", "kernel_time", "kernel_freq", "stride_time",
       "stride_freq", "n_rec_layers", "rec_hidden", "cell_kind", "fc_units",
       "rec_candidate_activation", "input_mels", "input_frames"},
      what);
  ModelConfig cfg;
  cfg.n_conv_filters = get_int(j, "n_conv_filters", cfg.n_conv_filters, what);
  cfg.kernel_time = get_int(j, "kernel_time", cfg.kernel_time, what);
  cfg.kernel_freq = get_int(j, "kernel_freq", cfg.kernel_freq, what);
  cfg.stride_time = get_int(j, "stride_time", cfg.stride_time, what);
  cfg.stride_freq = get_int(j, "stride_freq", cfg.stride_freq, what);
  cfg.n_rec_layers = get_int(j, "n_rec_layers", cfg.n_rec_layers, what);
  cfg.rec_hidden = get_int(j, "rec_hidden", cfg.rec_hidden, what);
  cfg.cell_kind = parse_cell_kind(get_string(j, "cell_kind", "gru", what));
  cfg.fc_units = get_int(j, "fc_units", cfg.fc_units, what);
  cfg.rec_candidate_activation = parse_rnn_activation(
      get_string(j, "rec_candidate_activation", "relu", what));
  cfg.input_mels = get_int(j, "input_mels", cfg.input_mels, what);
  cfg.input_frames = get_int(j, "input_frames", cfg.input_frames, what);
  return cfg;
}

}  // namespace kws
