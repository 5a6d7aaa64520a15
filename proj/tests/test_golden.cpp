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

// Byte-level compatibility tests. The expected FMAT and CPST images are
// rebuilt here from the documented layout, independent of the writers, and
// the committed golden files pin the on-disk formats so an accidental layout
// change fails even if reader and writer drift together.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "kws/align.hpp"
#include "kws/features.hpp"
#include "kws/model.hpp"

namespace {

using namespace kws;

std::string golden(const char* name) {
  return (std::filesystem::path(KWS_GOLDEN_DIR) / name).string();
}

std::string tmp_file(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::vector<std::uint8_t> file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

// Independent little-endian serialization: IEEE-754 bit pattern via
// bit_cast, least significant byte first.
void push_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff);
}
void push_f32(std::vector<std::uint8_t>& b, float v) {
  push_u32(b, std::bit_cast<std::uint32_t>(v));
}
void push_str(std::vector<std::uint8_t>& b, const char* s) {
  while (*s) b.push_back(static_cast<std::uint8_t>(*s++));
}

}  // namespace

TEST_CASE("fmat golden image matches the documented byte layout") {
  // sample.fmat holds a 2x3 matrix {1.5, -2.25, 0.5, 100, -0.125, 3}.
  std::vector<std::uint8_t> expected;
  push_str(expected, "FMAT");
  push_u32(expected, 1);
  push_u32(expected, 2);
  push_u32(expected, 3);
  for (float v : {1.5f, -2.25f, 0.5f, 100.0f, -0.125f, 3.0f}) {
    push_f32(expected, v);
  }
  CHECK(file_bytes(golden("sample.fmat")) == expected);

  const FeatureMatrix m = load_fmat(golden("sample.fmat"));
  REQUIRE(m.n_mels() == 2);
  REQUIRE(m.n_frames() == 3);
  CHECK(m.values(0, 0) == 1.5);
  CHECK(m.values(0, 1) == -2.25);
  CHECK(m.values(1, 0) == 100.0);
  CHECK(m.values(1, 2) == 3.0);

  const std::string fresh = tmp_file("kws_golden_fresh.fmat");
  save_fmat(fresh, m);
  CHECK(file_bytes(fresh) == expected);
}

TEST_CASE("cpst golden image matches the documented byte layout") {
  // sample.cpst: keyword "ab", 2x3 scores, 100 fps, origin 1.5 s.
  std::vector<std::uint8_t> expected;
  push_str(expected, "CPST");
  push_u32(expected, 1);
  push_u32(expected, 2);  // K
  push_u32(expected, 3);  // T
  push_f32(expected, 100.0f);
  push_f32(expected, 1.5f);
  push_u32(expected, 2);
  push_str(expected, "ab");
  for (float v : {0.5f, 1.0f, 0.0f, 0.25f, 0.75f, 2.0f}) {
    push_f32(expected, v);
  }
  CHECK(file_bytes(golden("sample.cpst")) == expected);

  const CharPosteriorMatrix p = load_cpst(golden("sample.cpst"));
  CHECK(p.chars == "ab");
  REQUIRE(p.n_chars() == 2);
  REQUIRE(p.n_frames() == 3);
  CHECK(p.frame_rate == 100.0);
  CHECK(p.origin_time_s == 1.5);
  CHECK(p.scores(0, 0) == 0.5);
  CHECK(p.scores(1, 2) == 2.0);

  const std::string fresh = tmp_file("kws_golden_fresh.cpst");
  save_cpst(fresh, p);
  CHECK(file_bytes(fresh) == expected);
}

TEST_CASE("checkpoint golden pins the container format") {
  const auto bytes = file_bytes(golden("sample.ckws"));
  REQUIRE(bytes.size() > 12);
  CHECK(bytes[0] == 'C');
  CHECK(bytes[1] == 'K');
  CHECK(bytes[2] == 'W');
  CHECK(bytes[3] == 'S');
  // u32 little-endian version 1, then the u32 header length.
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[6] == 0);
  CHECK(bytes[7] == 0);
  const std::uint32_t header_len =
      static_cast<std::uint32_t>(bytes[8]) |
      (static_cast<std::uint32_t>(bytes[9]) << 8) |
      (static_cast<std::uint32_t>(bytes[10]) << 16) |
      (static_cast<std::uint32_t>(bytes[11]) << 24);
  REQUIRE(12 + header_len < bytes.size());
  CHECK(bytes[12] == '{');  // JSON header starts right after the lengths

  // The golden was written with tensor j's element k set to j + 0.5*k.
  const Checkpoint ckpt = load_checkpoint(golden("sample.ckws"));
  CHECK(ckpt.config.n_conv_filters == 1);
  CHECK(ckpt.config.kernel_time == 2);
  CHECK(ckpt.config.kernel_freq == 2);
  CHECK(ckpt.config.n_rec_layers == 1);
  CHECK(ckpt.config.rec_hidden == 2);
  CHECK(ckpt.config.fc_units == 3);
  CHECK(ckpt.config.cell_kind == CellKind::kGru);
  CHECK(ckpt.metadata.at("created") == "golden");

  const auto views = tensor_views(ckpt.weights);
  REQUIRE(views.size() == 12);
  for (std::size_t j = 0; j < views.size(); ++j) {
    for (std::size_t k = 0; k < views[j].second; ++k) {
      CHECK(views[j].first[k] == static_cast<double>(j) + 0.5 * k);
    }
  }
  // A few spot values stated outright: the payload is f32 little-endian,
  // so conv.w = [0, 0.5, 1, 1.5] occupies the first 16 payload bytes.
  CHECK(ckpt.weights.conv_kernel[3] == 1.5);
  CHECK(ckpt.weights.conv_bias[0] == 1.0);
  CHECK(ckpt.weights.out_b[1] == 11.5);

  const std::string fresh = tmp_file("kws_golden_fresh.ckws");
  save_checkpoint(ckpt, fresh);
  CHECK(file_bytes(fresh) == bytes);
}
