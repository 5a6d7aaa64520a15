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

#ifndef KWS_RNG_HPP_
#define KWS_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace kws {

// Deterministic random source. The transformations from raw engine output
// to uniform/normal variates are spelled out here instead of relying on
// std::uniform_real_distribution, whose algorithm is implementation-defined.
// Two builds with the same seed therefore produce the same stream on any
// platform with IEEE-754 doubles.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer on [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n) {
    // Modulo bias is below 2^-40 for any n this library draws; acceptable.
    return engine_() % n;
  }

  // Standard normal via Box-Muller (one value per call, no caching so the
  // stream position is easy to reason about).
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Fisher-Yates shuffle of index vector contents.
  template <class Vec>
  void shuffle(Vec& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Derives a statistically independent child seed. Used to give each
  // (epoch, example) pair its own stream so results do not depend on
  // scheduling or batch composition.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b = 0) {
    // splitmix64 finalizer over a seed/stream mix.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (a + 1) +
                      0xBF58476D1CE4E5B9ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace kws

#endif  // KWS_RNG_HPP_
