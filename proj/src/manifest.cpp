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

#include "kws/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "kws/errors.hpp"

namespace kws {

namespace {

using nlohmann::json;

[[noreturn]] void fail(int line, const std::string& msg) {
  throw DataError("manifest line " + std::to_string(line) + ": " + msg);
}

ManifestEntry parse_entry(const json& j, int line) {
  if (!j.is_object()) fail(line, "record is not a JSON object");
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    if (key != "path" && key != "label" && key != "kind" && key != "span_s" &&
        key != "offset_s" && key != "split") {
      fail(line, "unknown key \"" + key + "\"");
    }
  }

  ManifestEntry e;
  if (!j.contains("path") || !j["path"].is_string()) {
    fail(line, "missing or non-string \"path\"");
  }
  e.path = j["path"].get<std::string>();
  if (e.path.empty()) fail(line, "empty \"path\"");

  if (j.contains("label")) {
    if (!j["label"].is_string()) fail(line, "\"label\" must be a string");
    e.label = j["label"].get<std::string>();
    if (e.label != "positive" && e.label != "negative") {
      fail(line, "\"label\" must be \"positive\" or \"negative\"");
    }
  }
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) fail(line, "\"kind\" must be a string");
    e.kind = j["kind"].get<std::string>();
    if (e.kind != "noise" && e.kind != "rir") {
      fail(line, "\"kind\" must be \"noise\" or \"rir\"");
    }
  }
  if (e.label.empty() == e.kind.empty()) {
    fail(line, "record needs exactly one of \"label\" or \"kind\"");
  }

  if (j.contains("span_s")) {
    if (e.label.empty()) fail(line, "\"span_s\" requires a labeled example");
    const json& span = j["span_s"];
    if (!span.is_array() || span.size() != 2 || !span[0].is_number() ||
        !span[1].is_number()) {
      fail(line, "\"span_s\" must be [begin, end]");
    }
    e.has_span = true;
    e.span_begin_s = span[0].get<double>();
    e.span_end_s = span[1].get<double>();
    if (e.span_begin_s < 0.0 || e.span_end_s < e.span_begin_s) {
      fail(line, "\"span_s\" must satisfy 0 <= begin <= end");
    }
  }
  if (j.contains("offset_s")) {
    if (e.label.empty()) fail(line, "\"offset_s\" requires a labeled example");
    if (!j["offset_s"].is_number()) fail(line, "\"offset_s\" must be a number");
    e.has_offset = true;
    e.offset_s = j["offset_s"].get<double>();
    if (e.offset_s < 0.0) fail(line, "\"offset_s\" must be >= 0");
  }
  if (j.contains("split")) {
    if (e.label.empty()) fail(line, "\"split\" requires a labeled example");
    if (!j["split"].is_string()) fail(line, "\"split\" must be a string");
    e.split = j["split"].get<std::string>();
    if (e.split != "train" && e.split != "dev") {
      fail(line, "\"split\" must be \"train\" or \"dev\"");
    }
  }
  return e;
}

}  // namespace

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);

  Manifest m;
  m.dir = std::filesystem::path(path).parent_path().string();

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& err) {
      fail(line_no, std::string("invalid JSON: ") + err.what());
    }
    ManifestEntry e = parse_entry(j, line_no);
    std::filesystem::path p(e.path);
    if (p.is_relative() && !m.dir.empty()) {
      e.path = (std::filesystem::path(m.dir) / p).string();
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

void save_manifest(const std::string& path,
                   const std::vector<ManifestEntry>& entries) {
  std::ostringstream out;
  for (const ManifestEntry& e : entries) {
    json j;
    j["path"] = e.path;
    if (!e.label.empty()) j["label"] = e.label;
    if (!e.kind.empty()) j["kind"] = e.kind;
    if (e.has_span) j["span_s"] = {e.span_begin_s, e.span_end_s};
    if (e.has_offset) j["offset_s"] = e.offset_s;
    if (!e.split.empty()) j["split"] = e.split;
    out << j.dump() << "\n";
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write manifest: " + path);
  file << out.str();
  if (!file) throw IoError("failed writing manifest: " + path);
}

}  // namespace kws
