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

#ifndef KWS_MANIFEST_HPP_
#define KWS_MANIFEST_HPP_

#include <string>
#include <vector>

namespace kws {

// One JSONL manifest record. A record is either a labeled example ("label"
// present) or a pool item ("kind" present: background noise or an impulse
// response); never both. Spans mark the keyword location inside example
// audio; offsets pin the window start for mined negatives; "split" assigns
// an example to "train" or "dev" (examples without it default to train).
struct ManifestEntry {
  std::string path;  // resolved against the manifest directory at load
  std::string label;
  std::string kind;
  bool has_span = false;
  double span_begin_s = 0.0;
  double span_end_s = 0.0;
  bool has_offset = false;
  double offset_s = 0.0;
  std::string split;

  bool is_example() const { return !label.empty(); }
  bool is_positive() const { return label == "positive"; }
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  std::string dir;  // directory the relative paths were resolved against
};

// Parses a JSONL manifest: one JSON object per non-empty line with keys
// "path" (required) plus "label", "kind", "span_s", "offset_s", "split" as
// described above. Unknown keys, malformed JSON, bad enum values, negative
// times, or a span with begin > end all raise DataError naming the line.
// Relative paths are resolved against the manifest's directory.
Manifest load_manifest(const std::string& path);

// Writes entries as JSONL. Paths are written as stored.
void save_manifest(const std::string& path,
                   const std::vector<ManifestEntry>& entries);

}  // namespace kws

#endif  // KWS_MANIFEST_HPP_
