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

#ifndef KWS_JSON_CONV_HPP_
#define KWS_JSON_CONV_HPP_

#include <initializer_list>
#include <string>

#include "json.hpp"
#include "kws/features.hpp"
#include "kws/model.hpp"

namespace kws {

// Strict JSON (de)serialization for configuration types. Every field is
// optional and defaults to the struct's default, but unknown keys are
// rejected so a typo fails loudly instead of silently falling back.

nlohmann::json to_json(const PcenConfig& cfg);
nlohmann::json to_json(const FeatureConfig& cfg);
nlohmann::json to_json(const ModelConfig& cfg);

PcenConfig pcen_config_from_json(const nlohmann::json& j);
FeatureConfig feature_config_from_json(const nlohmann::json& j);
ModelConfig model_config_from_json(const nlohmann::json& j);

// Shared strict-parsing helpers. All throw ConfigError with `what` naming
// the enclosing object.
void expect_object(const nlohmann::json& j, const char* what);
void expect_known_keys(const nlohmann::json& j,
                       std::initializer_list<const char*> keys,
                       const char* what);
int get_int(const nlohmann::json& j, const char* key, int def,
            const char* what);
double get_double(const nlohmann::json& j, const char* key, double def,
                  const char* what);
std::string get_string(const nlohmann::json& j, const char* key,
                       const std::string& def, const char* what);
bool get_bool(const nlohmann::json& j, const char* key, bool def,
              const char* what);

const char* to_string(FrontendMode mode);
FrontendMode parse_frontend_mode(const std::string& s);

}  // namespace kws

#endif  // KWS_JSON_CONV_HPP_
