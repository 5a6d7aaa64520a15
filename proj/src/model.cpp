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

#include "kws/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "kws/errors.hpp"
#include "kws/io_util.hpp"
#include "kws/json_conv.hpp"

namespace kws {
namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double candidate(RnnActivation act, double x) {
  if (act == RnnActivation::kRelu) return x > 0.0 ? x : 0.0;
  return std::tanh(x);
}

struct PadSpec {
  int lead_t = 0;
  int lead_f = 0;
};

// "Same" padding: pad_total = max((out-1)*stride + kernel - in, 0), with the
// smaller half leading.
PadSpec pad_spec(const ModelConfig& cfg, const ConvShape& s) {
  PadSpec p;
  const int tot_t = std::max(
      (s.time_out - 1) * cfg.stride_time + cfg.kernel_time - cfg.input_frames,
      0);
  const int tot_f = std::max(
      (s.freq_out - 1) * cfg.stride_freq + cfg.kernel_freq - cfg.input_mels, 0);
  p.lead_t = tot_t / 2;
  p.lead_f = tot_f / 2;
  return p;
}

void check_weight_shapes(const ModelConfig& cfg, const Weights& w) {
  const ConvShape s = conv_output_shape(cfg);
  const std::size_t kernel =
      static_cast<std::size_t>(cfg.n_conv_filters) * cfg.kernel_time *
      cfg.kernel_freq;
  if (w.conv_kernel.size() != kernel ||
      w.conv_bias.size() != static_cast<std::size_t>(cfg.n_conv_filters)) {
    throw DimensionError("conv weights do not match config");
  }
  if (w.rnn.size() != static_cast<std::size_t>(cfg.n_rec_layers)) {
    throw DimensionError("recurrent layer count does not match config");
  }
  const std::size_t gh =
      static_cast<std::size_t>(cfg.gates()) * cfg.rec_hidden;
  for (int l = 0; l < cfg.n_rec_layers; ++l) {
    const std::size_t din = static_cast<std::size_t>(cfg.rnn_input_dim(l));
    for (const RnnDirWeights* d : {&w.rnn[l].fw, &w.rnn[l].bw}) {
      if (d->w_in.rows != gh || d->w_in.cols != din || d->w_rec.rows != gh ||
          d->w_rec.cols != static_cast<std::size_t>(cfg.rec_hidden) ||
          d->bias.size() != gh) {
        throw DimensionError("recurrent weights do not match config");
      }
    }
  }
  const std::size_t flat =
      static_cast<std::size_t>(s.time_out) * 2 * cfg.rec_hidden;
  if (w.fc_w.rows != static_cast<std::size_t>(cfg.fc_units) ||
      w.fc_w.cols != flat ||
      w.fc_b.size() != static_cast<std::size_t>(cfg.fc_units)) {
    throw DimensionError("fc weights do not match config");
  }
  if (w.out_w.rows != 2 ||
      w.out_w.cols != static_cast<std::size_t>(cfg.fc_units) ||
      w.out_b.size() != 2) {
    throw DimensionError("output weights do not match config");
  }
}

Mat conv_pre_activation(const Mat& x, const ModelConfig& cfg,
                        const Weights& w) {
  const ConvShape s = conv_output_shape(cfg);
  const PadSpec pad = pad_spec(cfg, s);
  Mat out(static_cast<std::size_t>(s.time_out),
          static_cast<std::size_t>(cfg.n_conv_filters) * s.freq_out);
  for (int to = 0; to < s.time_out; ++to) {
    for (int c = 0; c < cfg.n_conv_filters; ++c) {
      const double* kern =
          w.conv_kernel.data() +
          static_cast<std::size_t>(c) * cfg.kernel_time * cfg.kernel_freq;
      for (int fo = 0; fo < s.freq_out; ++fo) {
        double acc = w.conv_bias[c];
        for (int kt = 0; kt < cfg.kernel_time; ++kt) {
          const int ti = to * cfg.stride_time + kt - pad.lead_t;
          if (ti < 0 || ti >= cfg.input_frames) continue;
          for (int kf = 0; kf < cfg.kernel_freq; ++kf) {
            const int fi = fo * cfg.stride_freq + kf - pad.lead_f;
            if (fi < 0 || fi >= cfg.input_mels) continue;
            acc += kern[kt * cfg.kernel_freq + kf] *
                   x(static_cast<std::size_t>(fi), static_cast<std::size_t>(ti));
          }
        }
        out(static_cast<std::size_t>(to),
            static_cast<std::size_t>(c) * s.freq_out + fo) = acc;
      }
    }
  }
  return out;
}

// One recurrent direction. The trace is indexed by processing step: step 0
// is sequence start for the forward direction and sequence end for the
// backward one, so both directions share this loop verbatim.
void run_direction(const Mat& seq, const RnnDirWeights& w, CellKind kind,
                   RnnActivation act, int n_hidden, bool reverse,
                   DirTrace* tr) {
  const std::size_t steps = seq.rows;
  const int h = n_hidden;
  const int g = kind == CellKind::kGru ? 3 : 4;
  tr->gates_pre = Mat(steps, static_cast<std::size_t>(g) * h);
  tr->h = Mat(steps, static_cast<std::size_t>(h));
  if (kind == CellKind::kLstm) tr->c = Mat(steps, static_cast<std::size_t>(h));

  Vec h_prev(static_cast<std::size_t>(h), 0.0);
  Vec c_prev(static_cast<std::size_t>(h), 0.0);
  Vec pre(static_cast<std::size_t>(g) * h);
  Vec reset_h(static_cast<std::size_t>(h));

  for (std::size_t step = 0; step < steps; ++step) {
    const std::size_t t = reverse ? steps - 1 - step : step;
    const double* x = seq.data.data() + t * seq.cols;
    matvec(w.w_in, x, pre.data());
    for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += w.bias[i];

    double* pre_row = tr->gates_pre.data.data() + step * tr->gates_pre.cols;
    double* h_row = tr->h.data.data() + step * tr->h.cols;

    if (kind == CellKind::kGru) {
      // Update and reset rows see h_{t-1}; the candidate row sees the reset
      // state r*h_{t-1}.
      for (int i = 0; i < 2 * h; ++i) {
        const double* row = w.w_rec.data.data() + static_cast<std::size_t>(i) * h;
        double acc = 0.0;
        for (int j = 0; j < h; ++j) acc += row[j] * h_prev[j];
        pre[i] += acc;
      }
      for (int i = 0; i < h; ++i) {
        reset_h[i] = sigmoid(pre[h + i]) * h_prev[i];
      }
      for (int i = 0; i < h; ++i) {
        const double* row =
            w.w_rec.data.data() + static_cast<std::size_t>(2 * h + i) * h;
        double acc = 0.0;
        for (int j = 0; j < h; ++j) acc += row[j] * reset_h[j];
        pre[2 * h + i] += acc;
      }
      for (int i = 0; i < h; ++i) {
        const double z = sigmoid(pre[i]);
        const double cand = candidate(act, pre[2 * h + i]);
        h_row[i] = (1.0 - z) * h_prev[i] + z * cand;
      }
    } else {
      matvec_acc(w.w_rec, h_prev.data(), pre.data());
      double* c_row = tr->c.data.data() + step * tr->c.cols;
      for (int i = 0; i < h; ++i) {
        const double gi = sigmoid(pre[i]);
        const double gf = sigmoid(pre[h + i]);
        const double gg = candidate(act, pre[2 * h + i]);
        const double go = sigmoid(pre[3 * h + i]);
        const double c = gf * c_prev[i] + gi * gg;
        c_row[i] = c;
        h_row[i] = go * candidate(act, c);
      }
      std::memcpy(c_prev.data(), c_row, sizeof(double) * h);
    }
    std::memcpy(pre_row, pre.data(), sizeof(double) * pre.size());
    std::memcpy(h_prev.data(), h_row, sizeof(double) * h);
  }
}

void run_layer(const Mat& seq, const RnnLayerWeights& w, CellKind kind,
               RnnActivation act, int n_hidden, LayerTrace* tr) {
  const int g = kind == CellKind::kGru ? 3 : 4;
  const std::size_t gh = static_cast<std::size_t>(g) * n_hidden;
  for (const RnnDirWeights* d : {&w.fw, &w.bw}) {
    if (d->w_in.rows != gh || d->w_in.cols != seq.cols || d->w_rec.rows != gh ||
        d->w_rec.cols != static_cast<std::size_t>(n_hidden) ||
        d->bias.size() != gh) {
      throw DimensionError("recurrent layer weights do not match input width");
    }
  }
  run_direction(seq, w.fw, kind, act, n_hidden, false, &tr->fw);
  run_direction(seq, w.bw, kind, act, n_hidden, true, &tr->bw);

  const std::size_t steps = seq.rows;
  const std::size_t h = static_cast<std::size_t>(n_hidden);
  tr->output = Mat(steps, 2 * h);
  for (std::size_t t = 0; t < steps; ++t) {
    const double* fw = tr->fw.h.data.data() + t * h;
    // Backward trace step s covers sequence position steps-1-s.
    const double* bw = tr->bw.h.data.data() + (steps - 1 - t) * h;
    double* out = tr->output.data.data() + t * 2 * h;
    std::memcpy(out, fw, sizeof(double) * h);
    std::memcpy(out + h, bw, sizeof(double) * h);
  }
  if (!all_finite(tr->output.data.data(), tr->output.size()) ||
      !all_finite(tr->fw.gates_pre.data.data(), tr->fw.gates_pre.size()) ||
      !all_finite(tr->bw.gates_pre.data.data(), tr->bw.gates_pre.size())) {
    throw NumericError("non-finite recurrent activation");
  }
}

}  // namespace

int ModelConfig::rnn_input_dim(int layer) const {
  if (layer == 0) return n_conv_filters * conv_output_shape(*this).freq_out;
  return 2 * rec_hidden;
}

void ModelConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) {
      throw ConfigError(std::string("model config: ") + name +
                        " must be >= 1");
    }
  };
  positive(n_conv_filters, "n_conv_filters");
  positive(kernel_time, "kernel_time");
  positive(kernel_freq, "kernel_freq");
  positive(stride_time, "stride_time");
  positive(stride_freq, "stride_freq");
  positive(n_rec_layers, "n_rec_layers");
  positive(rec_hidden, "rec_hidden");
  positive(fc_units, "fc_units");
  positive(input_mels, "input_mels");
  positive(input_frames, "input_frames");
}

ConvShape conv_output_shape(const ModelConfig& cfg) {
  cfg.validate();
  ConvShape s;
  s.time_out = (cfg.input_frames + cfg.stride_time - 1) / cfg.stride_time;
  s.freq_out = (cfg.input_mels + cfg.stride_freq - 1) / cfg.stride_freq;
  return s;
}

Weights alloc_weights(const ModelConfig& cfg) {
  cfg.validate();
  const ConvShape s = conv_output_shape(cfg);
  Weights w;
  w.conv_kernel.assign(static_cast<std::size_t>(cfg.n_conv_filters) *
                           cfg.kernel_time * cfg.kernel_freq,
                       0.0);
  w.conv_bias.assign(static_cast<std::size_t>(cfg.n_conv_filters), 0.0);
  const std::size_t gh = static_cast<std::size_t>(cfg.gates()) * cfg.rec_hidden;
  w.rnn.resize(static_cast<std::size_t>(cfg.n_rec_layers));
  for (int l = 0; l < cfg.n_rec_layers; ++l) {
    const std::size_t din = static_cast<std::size_t>(cfg.rnn_input_dim(l));
    for (RnnDirWeights* d : {&w.rnn[l].fw, &w.rnn[l].bw}) {
      d->w_in = Mat(gh, din);
      d->w_rec = Mat(gh, static_cast<std::size_t>(cfg.rec_hidden));
      d->bias.assign(gh, 0.0);
    }
  }
  w.fc_w = Mat(static_cast<std::size_t>(cfg.fc_units),
               static_cast<std::size_t>(s.time_out) * 2 * cfg.rec_hidden);
  w.fc_b.assign(static_cast<std::size_t>(cfg.fc_units), 0.0);
  w.out_w = Mat(2, static_cast<std::size_t>(cfg.fc_units));
  w.out_b.assign(2, 0.0);
  return w;
}

namespace {

// Draws quantized to binary32 so a checkpoint round-trip reproduces the
// in-memory values bit-exactly.
void fill_uniform_f32(Rng& rng, double bound, double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = static_cast<double>(
        static_cast<float>(rng.uniform(-bound, bound)));
  }
}

}  // namespace

Weights init_weights(const ModelConfig& cfg, Rng& rng) {
  Weights w = alloc_weights(cfg);
  const ConvShape s = conv_output_shape(cfg);
  fill_uniform_f32(rng,
                   1.0 / std::sqrt(static_cast<double>(cfg.kernel_time) *
                                   cfg.kernel_freq),
                   w.conv_kernel.data(), w.conv_kernel.size());
  for (int l = 0; l < cfg.n_rec_layers; ++l) {
    const double bound =
        1.0 / std::sqrt(static_cast<double>(cfg.rnn_input_dim(l)) +
                        cfg.rec_hidden);
    for (RnnDirWeights* d : {&w.rnn[l].fw, &w.rnn[l].bw}) {
      fill_uniform_f32(rng, bound, d->w_in.data.data(), d->w_in.size());
      fill_uniform_f32(rng, bound, d->w_rec.data.data(), d->w_rec.size());
      if (cfg.cell_kind == CellKind::kLstm) {
        // Forget gate opens at 1 so early training does not erase state.
        for (int i = 0; i < cfg.rec_hidden; ++i) {
          d->bias[static_cast<std::size_t>(cfg.rec_hidden) + i] = 1.0;
        }
      }
    }
  }
  fill_uniform_f32(
      rng, 1.0 / std::sqrt(static_cast<double>(s.time_out) * 2 * cfg.rec_hidden),
      w.fc_w.data.data(), w.fc_w.size());
  fill_uniform_f32(rng, 1.0 / std::sqrt(static_cast<double>(cfg.fc_units)),
                   w.out_w.data.data(), w.out_w.size());
  return w;
}

std::uint64_t weights_element_count(const Weights& w) {
  std::uint64_t n = w.conv_kernel.size() + w.conv_bias.size();
  for (const auto& layer : w.rnn) {
    for (const RnnDirWeights* d : {&layer.fw, &layer.bw}) {
      n += d->w_in.size() + d->w_rec.size() + d->bias.size();
    }
  }
  n += w.fc_w.size() + w.fc_b.size() + w.out_w.size() + w.out_b.size();
  return n;
}

std::uint64_t param_count(const ModelConfig& cfg) {
  cfg.validate();
  const ConvShape s = conv_output_shape(cfg);
  const std::uint64_t nc = cfg.n_conv_filters;
  const std::uint64_t nr = cfg.rec_hidden;
  const std::uint64_t g = cfg.gates();
  std::uint64_t total = nc * cfg.kernel_time * cfg.kernel_freq + nc;
  for (int l = 0; l < cfg.n_rec_layers; ++l) {
    const std::uint64_t din = cfg.rnn_input_dim(l);
    total += 2 * g * (nr * (din + nr) + nr);
  }
  const std::uint64_t flat = static_cast<std::uint64_t>(s.time_out) * 2 * nr;
  total += flat * cfg.fc_units + cfg.fc_units;
  total += 2ull * cfg.fc_units + 2;
  return total;
}

FlopsEstimate flops_estimate(const ModelConfig& cfg) {
  cfg.validate();
  const ConvShape s = conv_output_shape(cfg);
  const std::uint64_t nr = cfg.rec_hidden;
  const std::uint64_t g = cfg.gates();
  FlopsEstimate e;
  e.macs = static_cast<std::uint64_t>(s.time_out) * s.freq_out *
           cfg.n_conv_filters * cfg.kernel_time * cfg.kernel_freq;
  for (int l = 0; l < cfg.n_rec_layers; ++l) {
    const std::uint64_t din = cfg.rnn_input_dim(l);
    e.macs += 2ull * s.time_out * g * nr * (din + nr);
  }
  e.macs += static_cast<std::uint64_t>(s.time_out) * 2 * nr * cfg.fc_units;
  e.macs += 2ull * cfg.fc_units;
  e.flops = 2 * e.macs;
  return e;
}

Mat conv_forward(const FeatureMatrix& x, const ModelConfig& cfg,
                 const Weights& w) {
  cfg.validate();
  if (x.n_mels() != static_cast<std::size_t>(cfg.input_mels) ||
      x.n_frames() != static_cast<std::size_t>(cfg.input_frames)) {
    throw DimensionError("feature matrix shape does not match model config");
  }
  Mat out = conv_pre_activation(x.values, cfg, w);
  for (auto& v : out.data) v = v > 0.0 ? v : 0.0;
  return out;
}

Mat recurrent_forward(const Mat& seq, const RnnLayerWeights& w, CellKind kind,
                      RnnActivation act, int n_hidden) {
  LayerTrace tr;
  run_layer(seq, w, kind, act, n_hidden, &tr);
  return tr.output;
}

ForwardTrace model_forward_trace(const FeatureMatrix& x, const ModelConfig& cfg,
                                 const Weights& w) {
  cfg.validate();
  if (x.n_mels() != static_cast<std::size_t>(cfg.input_mels) ||
      x.n_frames() != static_cast<std::size_t>(cfg.input_frames)) {
    throw DimensionError("feature matrix shape does not match model config");
  }
  check_weight_shapes(cfg, w);

  ForwardTrace tr;
  tr.conv_pre = conv_pre_activation(x.values, cfg, w);
  if (!all_finite(tr.conv_pre.data.data(), tr.conv_pre.size())) {
    throw NumericError("non-finite convolution output");
  }
  tr.conv_out = tr.conv_pre;
  for (auto& v : tr.conv_out.data) v = v > 0.0 ? v : 0.0;

  tr.layers.resize(static_cast<std::size_t>(cfg.n_rec_layers));
  const Mat* cur = &tr.conv_out;
  for (int l = 0; l < cfg.n_rec_layers; ++l) {
    run_layer(*cur, w.rnn[l], cfg.cell_kind, cfg.rec_candidate_activation,
              cfg.rec_hidden, &tr.layers[l]);
    cur = &tr.layers[l].output;
  }

  // Row-major (time, feature) storage is already the flattened FC input.
  const Vec& flat = cur->data;
  tr.fc_pre.assign(static_cast<std::size_t>(cfg.fc_units), 0.0);
  matvec(w.fc_w, flat.data(), tr.fc_pre.data());
  for (int i = 0; i < cfg.fc_units; ++i) tr.fc_pre[i] += w.fc_b[i];
  tr.fc_out = tr.fc_pre;
  for (auto& v : tr.fc_out) v = v > 0.0 ? v : 0.0;

  for (int k = 0; k < 2; ++k) {
    const double* row = w.out_w.data.data() + static_cast<std::size_t>(k) *
                                                  w.out_w.cols;
    double acc = w.out_b[k];
    for (int i = 0; i < cfg.fc_units; ++i) acc += row[i] * tr.fc_out[i];
    tr.logits[k] = acc;
  }
  if (!std::isfinite(tr.logits[0]) || !std::isfinite(tr.logits[1])) {
    throw NumericError("non-finite logits");
  }
  const double m = std::max(tr.logits[0], tr.logits[1]);
  const double e0 = std::exp(tr.logits[0] - m);
  const double e1 = std::exp(tr.logits[1] - m);
  tr.probs[0] = e0 / (e0 + e1);
  tr.probs[1] = e1 / (e0 + e1);
  tr.score = tr.probs[1];
  return tr;
}

double model_forward(const FeatureMatrix& x, const Checkpoint& ckpt) {
  return model_forward_trace(x, ckpt.config, ckpt.weights).score;
}

namespace {

struct TensorSpec {
  std::string name;
  std::vector<std::uint32_t> shape;
  std::size_t count = 0;
};

std::vector<TensorSpec> tensor_specs(const ModelConfig& cfg) {
  const ConvShape s = conv_output_shape(cfg);
  const std::uint32_t gh =
      static_cast<std::uint32_t>(cfg.gates() * cfg.rec_hidden);
  std::vector<TensorSpec> specs;
  auto add = [&specs](std::string name, std::vector<std::uint32_t> shape) {
    std::size_t count = 1;
    for (auto d : shape) count *= d;
    specs.push_back({std::move(name), std::move(shape), count});
  };
  add("conv.w",
      {static_cast<std::uint32_t>(cfg.n_conv_filters),
       static_cast<std::uint32_t>(cfg.kernel_time),
       static_cast<std::uint32_t>(cfg.kernel_freq)});
  add("conv.b", {static_cast<std::uint32_t>(cfg.n_conv_filters)});
  for (int l = 0; l < cfg.n_rec_layers; ++l) {
    const auto din = static_cast<std::uint32_t>(cfg.rnn_input_dim(l));
    const auto nr = static_cast<std::uint32_t>(cfg.rec_hidden);
    const std::string base = "rnn" + std::to_string(l + 1) + ".";
    for (const char* dir : {"fw", "bw"}) {
      add(base + dir + ".W", {gh, din});
      add(base + dir + ".U", {gh, nr});
      add(base + dir + ".b", {gh});
    }
  }
  add("fc.w", {static_cast<std::uint32_t>(cfg.fc_units),
               static_cast<std::uint32_t>(s.time_out * 2 * cfg.rec_hidden)});
  add("fc.b", {static_cast<std::uint32_t>(cfg.fc_units)});
  add("out.w", {2, static_cast<std::uint32_t>(cfg.fc_units)});
  add("out.b", {2});
  return specs;
}

std::vector<double*> tensor_ptrs(Weights& w) {
  std::vector<double*> p;
  p.push_back(w.conv_kernel.data());
  p.push_back(w.conv_bias.data());
  for (auto& layer : w.rnn) {
    for (RnnDirWeights* d : {&layer.fw, &layer.bw}) {
      p.push_back(d->w_in.data.data());
      p.push_back(d->w_rec.data.data());
      p.push_back(d->bias.data());
    }
  }
  p.push_back(w.fc_w.data.data());
  p.push_back(w.fc_b.data());
  p.push_back(w.out_w.data.data());
  p.push_back(w.out_b.data());
  return p;
}

std::vector<const double*> tensor_ptrs(const Weights& w) {
  auto p = tensor_ptrs(const_cast<Weights&>(w));
  return {p.begin(), p.end()};
}

constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  ckpt.config.validate();
  check_weight_shapes(ckpt.config, ckpt.weights);
  const auto specs = tensor_specs(ckpt.config);
  const auto ptrs = tensor_ptrs(ckpt.weights);

  nlohmann::json manifest = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& spec : specs) {
    manifest.push_back({{"name", spec.name},
                        {"shape", spec.shape},
                        {"offset", offset}});
    offset += spec.count * 4;
  }
  nlohmann::json header{{"model", to_json(ckpt.config)},
                        {"feature", to_json(ckpt.feature)},
                        {"tensors", manifest},
                        {"metadata", ckpt.metadata}};
  const std::string header_str = header.dump();

  std::vector<std::uint8_t> bytes;
  bytes.reserve(12 + header_str.size() + offset);
  put_bytes(bytes, "CKWS", 4);
  put_u32(bytes, kCheckpointVersion);
  put_u32(bytes, static_cast<std::uint32_t>(header_str.size()));
  put_bytes(bytes, header_str.data(), header_str.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const double* src = ptrs[i];
    for (std::size_t k = 0; k < specs[i].count; ++k) {
      put_f32(bytes, static_cast<float>(src[k]));
    }
  }
  write_file(path, bytes);
}

Checkpoint load_checkpoint(const std::string& path) {
  const auto bytes = read_file(path);
  ByteReader r(bytes.data(), bytes.size());
  if (r.bytes(4, "magic") != "CKWS") {
    throw FormatError("not a checkpoint file (bad magic)");
  }
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion) {
    throw UnsupportedError("unsupported checkpoint version " +
                           std::to_string(version));
  }
  const std::uint32_t header_len = r.u32("header length");
  const std::string header_str = r.bytes(header_len, "header");

  nlohmann::json header;
  Checkpoint ckpt;
  nlohmann::json manifest;
  try {
    header = nlohmann::json::parse(header_str);
    ckpt.config = model_config_from_json(header.at("model"));
    ckpt.feature = feature_config_from_json(header.at("feature"));
    manifest = header.at("tensors");
    for (auto it = header.at("metadata").begin();
         it != header.at("metadata").end(); ++it) {
      ckpt.metadata[it.key()] = it.value().get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid checkpoint header: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid checkpoint header: ") + e.what());
  }
  ckpt.config.validate();
  ckpt.feature.validate();

  const auto specs = tensor_specs(ckpt.config);
  if (!manifest.is_array() || manifest.size() != specs.size()) {
    throw FormatError("checkpoint tensor manifest does not match config");
  }
  std::uint64_t offset = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& entry = manifest[i];
    if (!entry.is_object() || entry.value("name", "") != specs[i].name ||
        entry.value("offset", std::uint64_t(0)) != offset ||
        entry.value("shape", std::vector<std::uint32_t>{}) != specs[i].shape) {
      throw FormatError("checkpoint tensor manifest does not match config");
    }
    offset += specs[i].count * 4;
  }
  if (r.remaining() != offset) {
    throw FormatError(r.remaining() < offset
                          ? "truncated checkpoint payload"
                          : "trailing bytes after checkpoint payload");
  }

  ckpt.weights = alloc_weights(ckpt.config);
  const auto ptrs = tensor_ptrs(ckpt.weights);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    double* dst = ptrs[i];
    for (std::size_t k = 0; k < specs[i].count; ++k) {
      dst[k] = static_cast<double>(r.f32("tensor payload"));
    }
  }
  return ckpt;
}

std::vector<std::pair<double*, std::size_t>> tensor_views(Weights& w) {
  std::vector<std::pair<double*, std::size_t>> v;
  v.emplace_back(w.conv_kernel.data(), w.conv_kernel.size());
  v.emplace_back(w.conv_bias.data(), w.conv_bias.size());
  for (auto& layer : w.rnn) {
    for (RnnDirWeights* d : {&layer.fw, &layer.bw}) {
      v.emplace_back(d->w_in.data.data(), d->w_in.size());
      v.emplace_back(d->w_rec.data.data(), d->w_rec.size());
      v.emplace_back(d->bias.data(), d->bias.size());
    }
  }
  v.emplace_back(w.fc_w.data.data(), w.fc_w.size());
  v.emplace_back(w.fc_b.data(), w.fc_b.size());
  v.emplace_back(w.out_w.data.data(), w.out_w.size());
  v.emplace_back(w.out_b.data(), w.out_b.size());
  return v;
}

std::vector<std::pair<const double*, std::size_t>> tensor_views(
    const Weights& w) {
  auto views = tensor_views(const_cast<Weights&>(w));
  std::vector<std::pair<const double*, std::size_t>> out;
  out.reserve(views.size());
  for (auto [p, n] : views) out.emplace_back(p, n);
  return out;
}

ModelConfig chosen_config() { return ModelConfig{}; }

std::vector<SweepRow> table1_sweep() {
  struct RowSpec {
    int nc, lt, lf, st, sf, r, nr;
    CellKind cell;
    int nf;
    std::uint64_t printed;
  };
  // All 26 published rows, in table order. Printed counts are the table's
  // rounded "NNNk" values.
  static const RowSpec kRows[] = {
      {32, 20, 5, 8, 2, 2, 8, CellKind::kGru, 32, 45000},
      {32, 20, 5, 8, 2, 3, 8, CellKind::kLstm, 64, 68000},
      {32, 5, 1, 4, 1, 2, 8, CellKind::kGru, 64, 102000},
      {32, 20, 5, 8, 2, 2, 16, CellKind::kGru, 64, 110000},
      {32, 20, 5, 20, 5, 2, 32, CellKind::kGru, 64, 110000},
      {32, 20, 5, 8, 2, 3, 16, CellKind::kGru, 64, 115000},
      {16, 20, 5, 8, 2, 2, 32, CellKind::kGru, 32, 127000},
      {32, 20, 5, 12, 4, 2, 32, CellKind::kGru, 64, 143000},
      {16, 20, 5, 8, 2, 1, 32, CellKind::kGru, 64, 148000},
      {128, 20, 5, 8, 2, 3, 8, CellKind::kGru, 32, 159000},
      {64, 10, 3, 8, 2, 1, 16, CellKind::kGru, 32, 166000},
      {128, 20, 5, 8, 2, 1, 32, CellKind::kLstm, 64, 197000},
      {32, 20, 5, 12, 2, 2, 32, CellKind::kGru, 64, 205000},
      {32, 20, 5, 8, 2, 1, 32, CellKind::kGru, 64, 211000},
      {32, 20, 5, 8, 2, 2, 32, CellKind::kGru, 64, 229000},
      {32, 40, 10, 8, 2, 2, 32, CellKind::kGru, 64, 239000},
      {32, 20, 5, 8, 2, 3, 32, CellKind::kGru, 64, 248000},
      {32, 20, 5, 8, 2, 2, 32, CellKind::kLstm, 64, 279000},
      {32, 20, 5, 8, 1, 2, 32, CellKind::kGru, 64, 352000},
      {64, 20, 5, 8, 2, 2, 32, CellKind::kGru, 64, 355000},
      {64, 20, 5, 8, 2, 2, 32, CellKind::kLstm, 32, 407000},
      {64, 10, 3, 4, 1, 2, 32, CellKind::kGru, 64, 674000},
      {128, 20, 5, 8, 2, 2, 32, CellKind::kGru, 128, 686000},
      {32, 20, 5, 8, 2, 2, 128, CellKind::kGru, 128, 1513000},
      {256, 20, 5, 8, 2, 4, 64, CellKind::kGru, 128, 2551000},
      {128, 20, 5, 4, 1, 4, 64, CellKind::kGru, 128, 2850000},
  };

  std::vector<SweepRow> rows;
  rows.reserve(std::size(kRows));
  for (const auto& r : kRows) {
    SweepRow row;
    row.config.n_conv_filters = r.nc;
    row.config.kernel_time = r.lt;
    row.config.kernel_freq = r.lf;
    row.config.stride_time = r.st;
    row.config.stride_freq = r.sf;
    row.config.n_rec_layers = r.r;
    row.config.rec_hidden = r.nr;
    row.config.cell_kind = r.cell;
    row.config.fc_units = r.nf;
    row.exact_params = param_count(row.config);
    row.printed_params = r.printed;
    row.delta = static_cast<long long>(row.exact_params) -
                static_cast<long long>(row.printed_params);
    row.macs = flops_estimate(row.config).macs;
    row.reconciled = row.delta <= 1000 && row.delta >= -1000;
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* to_string(CellKind kind) {
  return kind == CellKind::kGru ? "gru" : "lstm";
}

const char* to_string(RnnActivation act) {
  return act == RnnActivation::kRelu ? "relu" : "tanh";
}

CellKind parse_cell_kind(const std::string& s) {
  if (s == "gru") return CellKind::kGru;
  if (s == "lstm") return CellKind::kLstm;
  throw ConfigError("unknown cell kind \"" + s + "\"");
}

RnnActivation parse_rnn_activation(const std::string& s) {
  if (s == "relu") return RnnActivation::kRelu;
  if (s == "tanh") return RnnActivation::kTanh;
  throw ConfigError("unknown recurrent activation \"" + s + "\"");
}

}  // namespace kws
