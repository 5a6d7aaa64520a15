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

// Release acceptance checks. Each criterion prints exactly one line,
// [PASS] or [FAIL], with the measured numbers; the exit code is the number
// of failed criteria. Reference computations here are written from the
// documented behavior, independent of the library internals they check.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kws/align.hpp"
#include "kws/audio.hpp"
#include "kws/augment.hpp"
#include "kws/errors.hpp"
#include "kws/features.hpp"
#include "kws/model.hpp"
#include "kws/rng.hpp"
#include "kws/streameval.hpp"
#include "kws/synth.hpp"
#include "kws/train.hpp"

namespace {

using namespace kws;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------------------
// Criterion 1: the architecture sweep reconciles the published parameter
// counts: at least 23 of 26 rows within +/-1000, the three known outliers
// reported with their deltas, the 229090 and 2550914 rows exact, under 1 s.

Outcome criterion1() {
  const auto t0 = clock_type::now();
  const std::vector<SweepRow> rows = table1_sweep();
  const double elapsed = seconds_since(t0);

  if (rows.size() != 26) {
    return {false, fmt("expected 26 rows, got %zu", rows.size())};
  }
  int reconciled = 0;
  for (const SweepRow& row : rows) reconciled += row.reconciled ? 1 : 0;

  std::string outliers;
  int n_outliers = 0;
  for (const SweepRow& row : rows) {
    if (row.reconciled) continue;
    ++n_outliers;
    outliers += fmt("%s%llu->%llu (delta %+lld)", n_outliers > 1 ? ", " : "",
                    static_cast<unsigned long long>(row.printed_params),
                    static_cast<unsigned long long>(row.exact_params),
                    row.delta);
  }
  bool outlier_identities = n_outliers == 3;
  for (const std::uint64_t printed : {159000ull, 166000ull, 197000ull}) {
    bool found = false;
    for (const SweepRow& row : rows) {
      if (!row.reconciled && row.printed_params == printed) found = true;
    }
    outlier_identities = outlier_identities && found;
  }

  bool exact_targets = false;
  bool exact_large = false;
  for (const SweepRow& row : rows) {
    if (row.exact_params == 229090 && row.printed_params == 229000) {
      exact_targets = true;
    }
    if (row.exact_params == 2550914) exact_large = true;
  }

  const bool pass = reconciled >= 23 && outlier_identities && exact_targets &&
                    exact_large && elapsed < 1.0;
  return {pass,
          fmt("%d/26 rows within +/-1000; outliers printed->exact: %s; "
              "229090 and 2550914 rows exact; %.3f s",
              reconciled, outliers.c_str(), elapsed)};
}

// ---------------------------------------------------------------------------
// Criterion 2: the frontend maps 1.5 s of 16 kHz audio to a 40x151 matrix.

Outcome criterion2() {
  AudioClip clip;
  clip.samples.resize(24000);
  Rng rng(2);
  for (auto& s : clip.samples) {
    s = 0.2f * static_cast<float>(rng.uniform(-1.0, 1.0));
  }
  const FeatureMatrix m = featurize(clip, FeatureConfig{});
  const bool pass = m.n_mels() == 40 && m.n_frames() == 151;
  return {pass, fmt("1.5 s at 16 kHz -> %zu mels x %zu frames", m.n_mels(),
                    m.n_frames())};
}

// ---------------------------------------------------------------------------
// Criterion 3: analytic gradients match central finite differences to a
// relative error below 1e-4 on randomized small configs covering both cell
// kinds and both candidate activations.

double batch_loss(const ModelConfig& cfg, const Weights& w,
                  const std::vector<LabeledExample>& batch) {
  double sum = 0.0;
  for (const LabeledExample& ex : batch) {
    sum += ce_loss(model_forward_trace(ex.features, cfg, w).score, ex.label);
  }
  return sum / static_cast<double>(batch.size());
}

double max_grad_rel_error(const ModelConfig& cfg, Weights w,
                          const std::vector<LabeledExample>& batch) {
  const BackwardResult analytic = backward(cfg, w, batch);
  auto wv = tensor_views(w);
  auto gv = tensor_views(analytic.grads);
  double worst = 0.0;
  for (std::size_t k = 0; k < wv.size(); ++k) {
    auto [wp, n] = wv[k];
    const double* gp = gv[k].first;
    for (std::size_t i = 0; i < n; ++i) {
      const double saved = wp[i];
      const double h = 1e-4 * (1.0 + std::abs(saved));
      wp[i] = saved + h;
      const double up = batch_loss(cfg, w, batch);
      wp[i] = saved - h;
      const double down = batch_loss(cfg, w, batch);
      wp[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double rel = std::abs(gp[i] - fd) /
                         std::max({1.0, std::abs(gp[i]), std::abs(fd)});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

Outcome criterion3() {
  struct Case {
    CellKind cell;
    RnnActivation act;
    int layers;
    int hidden;
    std::uint64_t seed;
  };
  const Case cases[] = {
      {CellKind::kGru, RnnActivation::kRelu, 1, 3, 201},
      {CellKind::kGru, RnnActivation::kRelu, 2, 2, 202},
      {CellKind::kGru, RnnActivation::kTanh, 1, 4, 203},
      {CellKind::kGru, RnnActivation::kTanh, 2, 3, 204},
      {CellKind::kLstm, RnnActivation::kRelu, 1, 3, 205},
      {CellKind::kLstm, RnnActivation::kRelu, 2, 2, 206},
      {CellKind::kLstm, RnnActivation::kTanh, 1, 4, 207},
      {CellKind::kLstm, RnnActivation::kTanh, 2, 3, 208},
      {CellKind::kGru, RnnActivation::kRelu, 3, 2, 209},
      {CellKind::kLstm, RnnActivation::kTanh, 3, 2, 210},
      {CellKind::kGru, RnnActivation::kTanh, 1, 5, 211},
      {CellKind::kLstm, RnnActivation::kRelu, 1, 5, 212},
  };
  double worst = 0.0;
  int n_cases = 0;
  for (const Case& c : cases) {
    ModelConfig cfg;
    cfg.n_conv_filters = 2;
    cfg.kernel_time = 3;
    cfg.kernel_freq = 2;
    cfg.stride_time = 2;
    cfg.stride_freq = 2;
    cfg.n_rec_layers = c.layers;
    cfg.rec_hidden = c.hidden;
    cfg.cell_kind = c.cell;
    cfg.fc_units = 4;
    cfg.rec_candidate_activation = c.act;
    cfg.input_mels = 6;
    cfg.input_frames = 9;

    Rng rng(c.seed);
    // Default init zeroes biases; with tiny stacks a row can then sit
    // exactly on the ReLU kink, where one-sided derivatives differ.
    // Random biases make that a measure-zero event.
    Weights w = init_weights(cfg, rng);
    auto randomize = [&rng](Vec& v) {
      for (auto& x : v) x = rng.uniform(-0.5, 0.5);
    };
    randomize(w.conv_bias);
    for (auto& layer : w.rnn) {
      randomize(layer.fw.bias);
      randomize(layer.bw.bias);
    }
    randomize(w.fc_b);
    randomize(w.out_b);

    std::vector<LabeledExample> batch;
    for (int b = 0; b < 3; ++b) {
      FeatureMatrix x;
      x.values = Mat(6, 9);
      for (auto& v : x.values.data) v = rng.uniform(0.0, 1.0);
      batch.push_back({std::move(x), b % 2});
    }
    worst = std::max(worst, max_grad_rel_error(cfg, w, batch));
    ++n_cases;
  }
  return {worst < 1e-4 && n_cases >= 10,
          fmt("%d configs (GRU/LSTM x relu/tanh, 1-3 layers), worst relative "
              "error %.3g (limit 1e-4)",
              n_cases, worst)};
}

// ---------------------------------------------------------------------------
// Criterion 4: training overfits the 32-example synthetic set to 100% train
// accuracy with CE below 0.05 within 2000 Adam steps, deterministically,
// in under five minutes.

Outcome criterion4() {
  const auto t0 = clock_type::now();
  const FeatureConfig fcfg;
  const std::vector<LabeledExample> examples = make_toy_examples(fcfg, 5);
  if (examples.size() != 32) {
    return {false, fmt("expected 32 toy examples, got %zu", examples.size())};
  }

  TrainDataset data;
  data.n_train = examples.size();
  data.train = [&examples](int, std::size_t index) {
    return examples[index];
  };
  data.dev = examples;

  const ModelConfig mcfg = toy_model_config();
  TrainConfig tcfg = toy_train_config();
  tcfg.early_stop_ce = 0.05;

  const TrainResult a = train_loop(mcfg, fcfg, tcfg, data);
  const TrainResult b = train_loop(mcfg, fcfg, tcfg, data);
  const double elapsed = seconds_since(t0);

  bool identical = a.total_steps == b.total_steps;
  const auto va = tensor_views(a.best.weights);
  const auto vb = tensor_views(b.best.weights);
  for (std::size_t k = 0; identical && k < va.size(); ++k) {
    for (std::size_t i = 0; identical && i < va[k].second; ++i) {
      identical = va[k].first[i] == vb[k].first[i];
    }
  }

  const bool pass = a.final_train_accuracy == 1.0 && a.final_train_ce < 0.05 &&
                    a.total_steps <= 2000 && identical && elapsed < 300.0;
  return {pass,
          fmt("accuracy %.1f%%, CE %.4f in %d steps (limit 2000); rerun "
              "bit-identical: %s; %.1f s (limit 300)",
              100.0 * a.final_train_accuracy, a.final_train_ce, a.total_steps,
              identical ? "yes" : "NO", elapsed)};
}

// ---------------------------------------------------------------------------
// Criterion 5: the alignment decay procedure matches an independent
// reference on 1000 random instances (up to 5 characters, 50 frames, alpha
// in {0, 0.25, 0.5, 1}, up to 3 iterations), is a no-op at alpha = 1, and is
// invariant to positive scaling of the scores.

std::pair<int, int> reference_align(std::vector<std::vector<double>> p,
                                    double alpha, int n_iter) {
  auto argmax = [](const std::vector<double>& row) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(row.size()); ++i) {
      if (row[i] > row[best]) best = i;
    }
    return best;
  };
  std::vector<std::vector<double>> rl = p;
  std::vector<std::vector<double>> lr = p;
  const int k_chars = static_cast<int>(p.size());
  for (int n = 0; n < n_iter; ++n) {
    for (int k = 0; k <= k_chars - 2; ++k) {
      const int peak = argmax(rl[k]);
      for (int t = peak; t < static_cast<int>(rl[k + 1].size()); ++t) {
        rl[k + 1][t] *= alpha;
      }
    }
    for (int k = k_chars - 1; k >= 1; --k) {
      const int peak = argmax(lr[k]);
      for (int t = 0; t <= peak; ++t) lr[k - 1][t] *= alpha;
    }
  }
  return {std::min(argmax(lr[0]), argmax(rl[0])),
          std::max(argmax(lr[k_chars - 1]), argmax(rl[k_chars - 1]))};
}

CharPosteriorMatrix make_posteriors(const std::vector<std::vector<double>>& rows) {
  CharPosteriorMatrix p;
  p.chars = std::string("abcde").substr(0, rows.size());
  p.scores = Mat(rows.size(), rows[0].size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t t = 0; t < rows[0].size(); ++t) {
      p.scores(k, t) = rows[k][t];
    }
  }
  return p;
}

Outcome criterion5() {
  Rng rng(505);
  const double alphas[] = {0.0, 0.25, 0.5, 1.0};
  int mismatches = 0;
  int alpha1_violations = 0;
  int scale_violations = 0;

  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k_chars = 1 + rng.uniform_index(5);
    const std::size_t t_frames = 1 + rng.uniform_index(50);
    const bool quantize = rng.uniform01() < 0.4;  // exact ties
    std::vector<std::vector<double>> rows(k_chars,
                                          std::vector<double>(t_frames));
    for (auto& row : rows) {
      for (auto& v : row) {
        v = rng.uniform01();
        if (quantize) v = std::floor(v * 4.0) / 4.0;
      }
    }
    AlignConfig cfg;
    cfg.alpha = alphas[rng.uniform_index(4)];
    cfg.n_iter = 1 + static_cast<int>(rng.uniform_index(3));
    cfg.smooth_window = 1;

    const auto [ref_begin, ref_end] =
        reference_align(rows, cfg.alpha, cfg.n_iter);
    const AlignmentSpan span = align_keyword(make_posteriors(rows), cfg);
    if (span.begin_frame != ref_begin || span.end_frame != ref_end) {
      ++mismatches;
    }

    if (cfg.alpha == 1.0) {
      // Decay by 1 changes nothing: the span must be the raw argmaxes.
      const auto [b0, e0] = reference_align(rows, 1.0, 1);
      if (span.begin_frame != b0 || span.end_frame != e0) {
        ++alpha1_violations;
      }
    }

    std::vector<std::vector<double>> scaled = rows;
    for (auto& row : scaled) {
      for (auto& v : row) v *= 3.7;
    }
    const AlignmentSpan span_scaled =
        align_keyword(make_posteriors(scaled), cfg);
    if (span_scaled.begin_frame != span.begin_frame ||
        span_scaled.end_frame != span.end_frame) {
      ++scale_violations;
    }
  }
  const bool pass =
      mismatches == 0 && alpha1_violations == 0 && scale_violations == 0;
  return {pass,
          fmt("1000 random instances (K<=5, T<=50, alpha in {0,0.25,0.5,1}, "
              "n_iter<=3): %d reference mismatches, %d alpha=1 violations, "
              "%d scale-invariance violations",
              mismatches, alpha1_violations, scale_violations)};
}

// ---------------------------------------------------------------------------
// Criterion 6: SNR mixing lands within 0.05 dB of the requested SNR across
// 1000 mixes drawn from [-5, 15] dB, whose mean sits at 5 +/- 0.3 dB.

Outcome criterion6() {
  Rng rng(606);
  AudioClip signal;
  signal.samples.resize(16000);
  for (std::size_t i = 0; i < signal.samples.size(); ++i) {
    signal.samples[i] = 0.3f * static_cast<float>(
        std::sin(2.0 * 3.14159265358979323846 * 700.0 * i / 16000.0));
  }
  AudioClip noise;
  noise.samples.resize(48000);
  for (auto& s : noise.samples) {
    s = 0.2f * static_cast<float>(rng.uniform(-1.0, 1.0));
  }

  double worst_dev = 0.0;
  double mean_target = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double target = rng.uniform(-5.0, 15.0);
    const MixResult mix = mix_at_snr(signal, noise, target, rng);
    worst_dev = std::max(worst_dev, std::abs(mix.realized_snr_db - target));
    mean_target += target;
  }
  mean_target /= 1000.0;
  const bool pass = worst_dev <= 0.05 && std::abs(mean_target - 5.0) <= 0.3;
  return {pass,
          fmt("1000 mixes over [-5, 15] dB: worst |realized - target| "
              "%.4f dB (limit 0.05); mean target %.2f dB (5 +/- 0.3)",
              worst_dev, mean_target)};
}

// ---------------------------------------------------------------------------
// Criterion 7: FRR and FA/hr arithmetic is exact on a small hand-checked
// fixture, and the DET sweep is monotone on randomized score sets.

Outcome criterion7() {
  const std::vector<ScoredWindow> windows = {
      {1.5, 0.9}, {2.0, 0.2}, {2.5, 0.8}, {3.0, 0.4}, {3.5, 0.95}};
  GroundTruth truth;
  truth.spans = {{1.0, 1.6}, {2.9, 3.45}};
  truth.total_negative_audio_s = 1800.0;
  truth.validate();

  // threshold 0.5: events at 1.5, 2.5, 3.5. Keyword ends 1.6 and 3.45 take
  // 1.5 and 3.5 (tolerance 0.3); 2.5 is near no keyword: one false alarm.
  const MatchResult at_half =
      match_detections(detect(windows, 0.5, 0.0), truth, 0.3);
  const bool half_ok = at_half.hits == 2 && at_half.misses == 0 &&
                       at_half.false_alarms == 1 &&
                       at_half.frr_percent == 0.0 &&
                       at_half.fa_per_hour == 2.0;  // 1 / (1800 s / 3600)

  // threshold 0.92: only 3.5 survives; keyword 1.6 is missed: FRR 50%.
  const MatchResult at_92 =
      match_detections(detect(windows, 0.92, 0.0), truth, 0.3);
  const bool high_ok = at_92.hits == 1 && at_92.misses == 1 &&
                       at_92.false_alarms == 0 &&
                       at_92.frr_percent == 50.0 && at_92.fa_per_hour == 0.0;

  Rng rng(707);
  int monotone_violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ScoredWindow> w;
    const int n = 5 + static_cast<int>(rng.uniform_index(60));
    for (int i = 0; i < n; ++i) {
      w.push_back({1.5 + 0.1 * i, std::floor(rng.uniform01() * 8.0) / 8.0});
    }
    GroundTruth t;
    const int keywords = static_cast<int>(rng.uniform_index(4));
    for (int k = 0; k < keywords; ++k) {
      const double begin = 5.0 * k + rng.uniform(0.0, 2.0);
      t.spans.push_back({begin, begin + rng.uniform(0.2, 1.0)});
    }
    t.total_negative_audio_s = 600.0;
    const EvalReport report = det_curve(w, t, 0.75);
    for (std::size_t i = 1; i < report.points.size(); ++i) {
      const bool ok =
          report.points[i].threshold < report.points[i - 1].threshold &&
          report.points[i].fa_per_hour >= report.points[i - 1].fa_per_hour &&
          report.points[i].frr_percent <= report.points[i - 1].frr_percent;
      if (!ok) ++monotone_violations;
    }
  }

  const bool pass = half_ok && high_ok && monotone_violations == 0;
  return {pass,
          fmt("fixture exact (FRR 0%% FA/hr 2.0 at 0.5; FRR 50%% FA/hr 0.0 "
              "at 0.92): %s; DET monotone on 100 random sets: %d violations",
              half_ok && high_ok ? "yes" : "NO", monotone_violations)};
}

// ---------------------------------------------------------------------------
// Criterion 8: a single 1.5 s window scores in under 280 ms, and one hour
// of audio at a 100 ms hop is processed faster than real time.

Outcome criterion8() {
  Checkpoint ckpt;
  ckpt.config = chosen_config();
  Rng rng(808);
  ckpt.weights = init_weights(ckpt.config, rng);

  AudioClip window_clip;
  window_clip.samples.resize(24000);
  for (auto& s : window_clip.samples) {
    s = 0.2f * static_cast<float>(rng.uniform(-1.0, 1.0));
  }
  // Warm-up, then take the median of five runs.
  (void)model_forward(featurize(window_clip, ckpt.feature), ckpt);
  std::vector<double> times;
  for (int i = 0; i < 5; ++i) {
    const auto t0 = clock_type::now();
    (void)model_forward(featurize(window_clip, ckpt.feature), ckpt);
    times.push_back(seconds_since(t0));
  }
  std::sort(times.begin(), times.end());
  const double single_ms = times[2] * 1000.0;

  AudioClip hour;
  hour.samples.resize(3600 * 16000);
  for (auto& s : hour.samples) {
    s = 0.2f * static_cast<float>(rng.uniform(-1.0, 1.0));
  }
  StreamConfig scfg;  // 1.5 s window, 100 ms hop
  const auto t0 = clock_type::now();
  const StreamResult stream = stream_scores(hour, ckpt, scfg);
  const double hour_s = seconds_since(t0);

  const bool pass = single_ms < 280.0 && stream.windows.size() == 35986 &&
                    hour_s < 3600.0;
  return {pass,
          fmt("single window %.2f ms (limit 280); 1 h at 100 ms hop = %zu "
              "windows in %.1f s (%.1fx real time)",
              single_ms, stream.windows.size(), hour_s, 3600.0 / hour_s)};
}

// ---------------------------------------------------------------------------
// Criterion 9: the per-window cost of the deployed architecture is
// documented against the published ~30M FLOPs figure. Documented, not
// asserted: the published number's counting convention is not stated, and
// our analytic count of the same matrix work is 4,095,616 MACs.

Outcome criterion9() {
  const FlopsEstimate est = flops_estimate(chosen_config());
  const bool pass = est.macs == 4095616 && est.flops == 2 * est.macs;
  return {pass,
          fmt("deployed window costs %llu MACs = %llu FLOPs (analytic, "
              "matrix work only); published figure ~30M FLOPs follows a "
              "different, unstated convention; gap documented, not asserted",
              static_cast<unsigned long long>(est.macs),
              static_cast<unsigned long long>(est.flops))};
}

// ---------------------------------------------------------------------------
// Criterion 10: checkpoints, feature matrices, and posterior files survive
// round trips bit-exactly, and the committed golden files pin the
// little-endian byte layout.

std::vector<std::uint8_t> file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

Outcome criterion10() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "kws_acceptance";
  fs::create_directories(dir);
  Rng rng(1010);
  auto q = [](double v) {  // binary32 quantization
    return static_cast<double>(static_cast<float>(v));
  };

  // FMAT round trip.
  FeatureMatrix m;
  m.values = Mat(7, 13);
  for (auto& v : m.values.data) v = q(rng.uniform(-2.0, 2.0));
  const std::string fmat_a = (dir / "a.fmat").string();
  const std::string fmat_b = (dir / "b.fmat").string();
  save_fmat(fmat_a, m);
  const FeatureMatrix m2 = load_fmat(fmat_a);
  save_fmat(fmat_b, m2);
  const bool fmat_ok = m2.values.data == m.values.data &&
                       file_bytes(fmat_a) == file_bytes(fmat_b);

  // CPST round trip.
  CharPosteriorMatrix p;
  p.chars = "abc";
  p.scores = Mat(3, 17);
  for (auto& v : p.scores.data) v = q(rng.uniform01());
  p.frame_rate = 100.0;
  p.origin_time_s = 2.5;
  const std::string cpst_a = (dir / "a.cpst").string();
  const std::string cpst_b = (dir / "b.cpst").string();
  save_cpst(cpst_a, p);
  const CharPosteriorMatrix p2 = load_cpst(cpst_a);
  save_cpst(cpst_b, p2);
  const bool cpst_ok = p2.scores.data == p.scores.data && p2.chars == "abc" &&
                       p2.origin_time_s == 2.5 &&
                       file_bytes(cpst_a) == file_bytes(cpst_b);

  // Checkpoint round trip.
  Checkpoint ckpt;
  ckpt.config.n_conv_filters = 3;
  ckpt.config.rec_hidden = 4;
  ckpt.config.fc_units = 5;
  ckpt.config.cell_kind = CellKind::kLstm;
  ckpt.weights = init_weights(ckpt.config, rng);
  ckpt.metadata["note"] = "acceptance";
  const std::string ckws_a = (dir / "a.ckws").string();
  const std::string ckws_b = (dir / "b.ckws").string();
  save_checkpoint(ckpt, ckws_a);
  const Checkpoint ckpt2 = load_checkpoint(ckws_a);
  save_checkpoint(ckpt2, ckws_b);
  bool ckws_ok = file_bytes(ckws_a) == file_bytes(ckws_b) &&
                 ckpt2.metadata.at("note") == "acceptance";
  const auto va = tensor_views(ckpt.weights);
  const auto vb = tensor_views(ckpt2.weights);
  for (std::size_t k = 0; ckws_ok && k < va.size(); ++k) {
    for (std::size_t i = 0; ckws_ok && i < va[k].second; ++i) {
      ckws_ok = va[k].first[i] == vb[k].first[i];
    }
  }

  // Golden little-endian layout: rebuild the expected FMAT image from the
  // documented format and compare it to the committed file.
  std::vector<std::uint8_t> expected;
  auto push_u32 = [&expected](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) expected.push_back((v >> (8 * i)) & 0xff);
  };
  for (char c : {'F', 'M', 'A', 'T'}) {
    expected.push_back(static_cast<std::uint8_t>(c));
  }
  push_u32(1);
  push_u32(2);
  push_u32(3);
  for (float v : {1.5f, -2.25f, 0.5f, 100.0f, -0.125f, 3.0f}) {
    push_u32(std::bit_cast<std::uint32_t>(v));
  }
  const std::string golden_fmat =
      (fs::path(KWS_GOLDEN_DIR) / "sample.fmat").string();
  const FeatureMatrix golden = load_fmat(golden_fmat);
  const bool golden_ok = file_bytes(golden_fmat) == expected &&
                         golden.values(0, 0) == 1.5 &&
                         golden.values(1, 2) == 3.0;

  const bool pass = fmat_ok && cpst_ok && ckws_ok && golden_ok;
  return {pass, fmt("round trips bit-exact: fmat %s, cpst %s, ckws %s; "
                    "golden little-endian layout: %s",
                    fmat_ok ? "yes" : "NO", cpst_ok ? "yes" : "NO",
                    ckws_ok ? "yes" : "NO", golden_ok ? "yes" : "NO")};
}

}  // namespace

int main() {
  const std::pair<int, std::function<Outcome()>> criteria[] = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
      {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8},
      {9, criterion9}, {10, criterion10},
  };
  int failures = 0;
  for (const auto& [number, fn] : criteria) {
    Outcome outcome;
    try {
      outcome = fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %d: %s\n", outcome.pass ? "PASS" : "FAIL",
                number, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  std::printf("acceptance: %d/10 criteria passed\n", 10 - failures);
  return failures;
}
