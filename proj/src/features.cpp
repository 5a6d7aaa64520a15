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

#include "kws/features.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "kws/errors.hpp"
#include "kws/io_util.hpp"

namespace kws {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 complex FFT. Size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

// Triangular mel filterbank with unit peaks, linear interpolation in the mel
// domain. Returned as a dense (n_mels x n_bins) weight matrix; the bank is
// small enough that sparsity is not worth the bookkeeping.
Mat build_mel_bank(const FeatureConfig& cfg) {
  const int n_bins = cfg.fft_size / 2 + 1;
  const double mel_lo = hz_to_mel(cfg.fmin);
  const double mel_hi = hz_to_mel(cfg.fmax);
  std::vector<double> centers(static_cast<std::size_t>(cfg.n_mels) + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i) {
    centers[static_cast<std::size_t>(i)] =
        mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1);
  }
  Mat bank(static_cast<std::size_t>(cfg.n_mels),
           static_cast<std::size_t>(n_bins));
  const double hz_per_bin =
      static_cast<double>(cfg.sample_rate) / cfg.fft_size;
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double left = centers[static_cast<std::size_t>(m)];
    const double mid = centers[static_cast<std::size_t>(m) + 1];
    const double right = centers[static_cast<std::size_t>(m) + 2];
    for (int b = 0; b < n_bins; ++b) {
      const double mel = hz_to_mel(b * hz_per_bin);
      double w = 0.0;
      if (mel > left && mel < right) {
        w = mel <= mid ? (mel - left) / (mid - left)
                       : (right - mel) / (right - mid);
      }
      bank(static_cast<std::size_t>(m), static_cast<std::size_t>(b)) = w;
    }
  }
  return bank;
}

}  // namespace

int FeatureConfig::hop_samples() const {
  return static_cast<int>(hop_ms * sample_rate / 1000.0 + 0.5);
}

int FeatureConfig::window_samples() const {
  return static_cast<int>(window_ms * sample_rate / 1000.0 + 0.5);
}

void FeatureConfig::validate() const {
  if (sample_rate <= 0) throw ConfigError("sample_rate must be positive");
  const double hop_exact = hop_ms * sample_rate / 1000.0;
  if (std::abs(hop_exact - std::round(hop_exact)) > 1e-9 || hop_exact < 1.0) {
    throw ConfigError("hop_ms must map to a whole positive sample count");
  }
  const double win_exact = window_ms * sample_rate / 1000.0;
  if (std::abs(win_exact - std::round(win_exact)) > 1e-9 || win_exact < 1.0) {
    throw ConfigError("window_ms must map to a whole positive sample count");
  }
  if (!is_pow2(fft_size)) throw ConfigError("fft_size must be a power of two");
  if (window_samples() > fft_size) {
    throw ConfigError("window longer than FFT size");
  }
  if (n_mels < 1) throw ConfigError("n_mels must be >= 1");
  if (!(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0)) {
    throw ConfigError("need 0 <= fmin < fmax <= sample_rate/2");
  }
  if (!(pcen.smoother > 0.0 && pcen.smoother <= 1.0)) {
    throw ConfigError("pcen smoother must be in (0, 1]");
  }
  if (!(pcen.alpha > 0.0 && pcen.alpha <= 1.0)) {
    throw ConfigError("pcen alpha must be in (0, 1]");
  }
  if (pcen.delta < 0.0) throw ConfigError("pcen delta must be >= 0");
  if (!(pcen.root > 0.0 && pcen.root <= 1.0)) {
    throw ConfigError("pcen root must be in (0, 1]");
  }
  if (!(pcen.floor > 0.0)) throw ConfigError("pcen floor must be > 0");
}

Mat mel_energies(const AudioClip& clip, const FeatureConfig& cfg) {
  cfg.validate();
  if (clip.sample_rate != cfg.sample_rate) {
    throw ConfigError("clip sample rate does not match feature config");
  }
  const int hop = cfg.hop_samples();
  const int win = cfg.window_samples();
  const auto n_samples = static_cast<long long>(clip.samples.size());
  if (n_samples < hop) {
    throw DomainError("clip shorter than one hop");
  }
  const std::size_t n_frames = static_cast<std::size_t>(n_samples / hop) + 1;

  std::vector<double> window(static_cast<std::size_t>(win));
  for (int n = 0; n < win; ++n) {
    window[static_cast<std::size_t>(n)] =
        0.5 - 0.5 * std::cos(2.0 * kPi * n / win);
  }

  const Mat bank = build_mel_bank(cfg);
  const int n_bins = cfg.fft_size / 2 + 1;

  Mat energies(static_cast<std::size_t>(cfg.n_mels), n_frames);
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(cfg.fft_size));
  std::vector<double> power(static_cast<std::size_t>(n_bins));

  for (std::size_t t = 0; t < n_frames; ++t) {
    // Frame t is centered on sample t*hop; samples outside the clip are zero.
    const long long center = static_cast<long long>(t) * hop;
    const long long start = center - win / 2;
    for (int n = 0; n < cfg.fft_size; ++n) buf[static_cast<std::size_t>(n)] = 0.0;
    for (int n = 0; n < win; ++n) {
      const long long idx = start + n;
      if (idx >= 0 && idx < n_samples) {
        buf[static_cast<std::size_t>(n)] =
            static_cast<double>(clip.samples[static_cast<std::size_t>(idx)]) *
            window[static_cast<std::size_t>(n)];
      }
    }
    fft_inplace(buf);
    for (int b = 0; b < n_bins; ++b) {
      power[static_cast<std::size_t>(b)] =
          std::norm(buf[static_cast<std::size_t>(b)]);
    }
    for (int m = 0; m < cfg.n_mels; ++m) {
      const double* w = bank.data.data() + static_cast<std::size_t>(m) *
                                               static_cast<std::size_t>(n_bins);
      double acc = 0.0;
      for (int b = 0; b < n_bins; ++b) acc += w[b] * power[static_cast<std::size_t>(b)];
      energies(static_cast<std::size_t>(m), t) = acc;
    }
  }
  return energies;
}

FeatureMatrix pcen(const Mat& energies, const PcenConfig& cfg, double hop_ms,
                   double origin_time_s) {
  for (const double e : energies.data) {
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw DomainError("pcen input energies must be finite and nonnegative");
    }
  }
  FeatureMatrix out;
  out.values = Mat(energies.rows, energies.cols);
  out.hop_ms = hop_ms;
  out.origin_time_s = origin_time_s;
  const double delta_pow = std::pow(cfg.delta, cfg.root);
  for (std::size_t ch = 0; ch < energies.rows; ++ch) {
    double m = 0.0;
    for (std::size_t t = 0; t < energies.cols; ++t) {
      const double e = energies(ch, t);
      m = t == 0 ? e : (1.0 - cfg.smoother) * m + cfg.smoother * e;
      const double gain = std::pow(cfg.floor + m, cfg.alpha);
      const double v = std::pow(e / gain + cfg.delta, cfg.root) - delta_pow;
      // Guard against a tiny negative from rounding when e is ~0.
      out.values(ch, t) = v < 0.0 ? 0.0 : v;
    }
  }
  return out;
}

FeatureMatrix featurize(const AudioClip& clip, const FeatureConfig& cfg) {
  Mat energies = mel_energies(clip, cfg);
  if (cfg.mode == FrontendMode::kLogMel) {
    FeatureMatrix out;
    out.values = Mat(energies.rows, energies.cols);
    out.hop_ms = cfg.hop_ms;
    for (std::size_t i = 0; i < energies.data.size(); ++i) {
      out.values.data[i] = std::log(energies.data[i] + cfg.pcen.floor);
    }
    return out;
  }
  return pcen(energies, cfg.pcen, cfg.hop_ms, 0.0);
}

void save_fmat(const std::string& path, const FeatureMatrix& m) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + m.values.size() * 4);
  put_bytes(out, "FMAT", 4);
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(m.values.rows));
  put_u32(out, static_cast<std::uint32_t>(m.values.cols));
  for (const double v : m.values.data) put_f32(out, static_cast<float>(v));
  write_file(path, out);
}

FeatureMatrix load_fmat(const std::string& path) {
  const auto bytes = read_file(path);
  ByteReader r(bytes.data(), bytes.size());
  if (r.bytes(4, "FMAT magic") != "FMAT") throw FormatError("bad FMAT magic");
  const std::uint32_t version = r.u32("FMAT version");
  if (version != 1) {
    throw UnsupportedError("unsupported FMAT version " +
                           std::to_string(version));
  }
  const std::uint32_t rows = r.u32("rows");
  const std::uint32_t cols = r.u32("cols");
  FeatureMatrix m;
  m.values = Mat(rows, cols);
  r.need(static_cast<std::size_t>(rows) * cols * 4, "payload");
  for (auto& v : m.values.data) v = static_cast<double>(r.f32());
  if (r.remaining() != 0) throw FormatError("trailing bytes in FMAT file");
  return m;
}

}  // namespace kws
