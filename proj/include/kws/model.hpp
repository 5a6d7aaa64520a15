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

#ifndef KWS_MODEL_HPP_
#define KWS_MODEL_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kws/features.hpp"
#include "kws/mat.hpp"
#include "kws/rng.hpp"

namespace kws {

enum class CellKind { kGru, kLstm };
enum class RnnActivation { kRelu, kTanh };

// The CRNN layout: one strided 2-D convolution over (time, frequency),
// a stack of bidirectional recurrent layers, a fully connected layer over
// the time-flattened recurrent output, and a two-way softmax.
struct ModelConfig {
  int n_conv_filters = 32;  // N_C
  int kernel_time = 20;     // L_T
  int kernel_freq = 5;      // L_F
  int stride_time = 8;      // S_T
  int stride_freq = 2;      // S_F
  int n_rec_layers = 2;     // R
  int rec_hidden = 32;      // N_R, per direction
  CellKind cell_kind = CellKind::kGru;
  int fc_units = 64;  // N_F
  RnnActivation rec_candidate_activation = RnnActivation::kRelu;
  int input_mels = 40;
  int input_frames = 151;

  // Gate count per cell: GRU stacks (update, reset, candidate), LSTM stacks
  // (input, forget, cell, output). The stacking order is frozen; checkpoint
  // layout depends on it.
  int gates() const { return cell_kind == CellKind::kGru ? 3 : 4; }

  // Input width of recurrent layer `layer` (0-based): the flattened conv
  // output for layer 0, the previous layer's bidirectional output otherwise.
  int rnn_input_dim(int layer) const;

  void validate() const;
};

struct ConvShape {
  int time_out = 0;
  int freq_out = 0;
};

// "Same" padding shape rule: out = ceil(in / stride) in each dimension.
ConvShape conv_output_shape(const ModelConfig& cfg);

// Weights for one recurrent direction. `w_in` is (G*N_R x D_in), `w_rec` is
// (G*N_R x N_R), `bias` has G*N_R entries (a single bias per gate).
struct RnnDirWeights {
  Mat w_in;
  Mat w_rec;
  Vec bias;
};

struct RnnLayerWeights {
  RnnDirWeights fw;
  RnnDirWeights bw;
};

struct Weights {
  Vec conv_kernel;  // N_C * L_T * L_F, kernel-major then time then freq
  Vec conv_bias;    // N_C
  std::vector<RnnLayerWeights> rnn;
  Mat fc_w;   // N_F x (time_out * 2 * N_R)
  Vec fc_b;   // N_F
  Mat out_w;  // 2 x N_F
  Vec out_b;  // 2
};

// Gradients mirror the weight layout exactly.
using GradSet = Weights;

struct Checkpoint {
  ModelConfig config;
  FeatureConfig feature;
  Weights weights;
  std::map<std::string, std::string> metadata;
};

// Zero-filled weight tensors shaped for `cfg`.
Weights alloc_weights(const ModelConfig& cfg);

// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) init; biases zero except the
// LSTM forget gate, which starts at 1.
Weights init_weights(const ModelConfig& cfg, Rng& rng);

std::uint64_t weights_element_count(const Weights& w);

// Exact trainable parameter count derived from the config alone. Always
// equal to weights_element_count(alloc_weights(cfg)).
std::uint64_t param_count(const ModelConfig& cfg);

struct FlopsEstimate {
  std::uint64_t macs = 0;   // multiply-accumulates per input window
  std::uint64_t flops = 0;  // 2 * macs
};

// Analytic per-window cost of the matrix work (conv, recurrent, FC, output).
// Elementwise gates and activations are excluded.
FlopsEstimate flops_estimate(const ModelConfig& cfg);

// Strided zero-padded cross-correlation plus bias and ReLU. Input is the
// (input_mels x input_frames) feature matrix; output rows are time steps and
// columns are the N_C*freq_out conv features, channel-major.
Mat conv_forward(const FeatureMatrix& x, const ModelConfig& cfg,
                 const Weights& w);

// One bidirectional recurrent layer over `seq` (rows = time steps). Output
// row t is [forward state_t ; backward state_t]. h(0) (and c(0) for LSTM)
// are zero. Gates use sigmoid; the candidate nonlinearity is `act`.
Mat recurrent_forward(const Mat& seq, const RnnLayerWeights& w, CellKind kind,
                      RnnActivation act, int n_hidden);

// Intermediate activations kept by the forward pass so a backward pass can
// run without recomputation.
struct DirTrace {
  Mat gates_pre;  // T x (G*N_R), indexed by processing step
  Mat h;          // T x N_R
  Mat c;          // T x N_R, LSTM only
};

struct LayerTrace {
  DirTrace fw;
  DirTrace bw;
  Mat output;  // T x 2*N_R
};

struct ForwardTrace {
  Mat conv_pre;  // pre-ReLU conv output, time-major
  Mat conv_out;
  std::vector<LayerTrace> layers;
  Vec fc_pre;
  Vec fc_out;
  double logits[2] = {0.0, 0.0};
  double probs[2] = {0.0, 0.0};
  double score = 0.0;  // keyword-class posterior, probs[1]
};

// Full forward pass with trace. Throws DimensionError when `x` does not
// match the config and NumericError when activations leave the finite range.
ForwardTrace model_forward_trace(const FeatureMatrix& x, const ModelConfig& cfg,
                                 const Weights& w);

// Keyword posterior in [0, 1] for one input window.
double model_forward(const FeatureMatrix& x, const Checkpoint& ckpt);

// Checkpoint container: magic "CKWS", u32 LE version=1, u32 LE header
// length, UTF-8 JSON header (model config, feature config, tensor manifest
// with shapes and payload byte offsets, metadata), then IEEE-754 binary32 LE
// row-major tensor payloads in manifest order. Tensor names: conv.w, conv.b,
// rnn{l}.{fw|bw}.{W|U|b} with l starting at 1, fc.w, fc.b, out.w, out.b.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// One published architecture comparison row: the config, its exact count,
// the rounded count reported in the published table, and their difference.
struct SweepRow {
  ModelConfig config;
  std::uint64_t exact_params = 0;
  std::uint64_t printed_params = 0;
  long long delta = 0;
  std::uint64_t macs = 0;
  bool reconciled = false;  // |delta| <= 1000
};

// Parameter accounting for all 26 published architecture rows.
std::vector<SweepRow> table1_sweep();

// Flat (pointer, element count) views over every tensor in `w`, in
// checkpoint manifest order. The optimizer and the finite-difference tests
// treat the whole parameter set as one vector through these.
std::vector<std::pair<double*, std::size_t>> tensor_views(Weights& w);
std::vector<std::pair<const double*, std::size_t>> tensor_views(
    const Weights& w);

// The architecture used throughout: N_C=32, kernel (20,5), stride (8,2),
// two bidirectional GRU layers of 32 units, N_F=64 (the "229k" row).
ModelConfig chosen_config();

const char* to_string(CellKind kind);
const char* to_string(RnnActivation act);
CellKind parse_cell_kind(const std::string& s);         // ConfigError
RnnActivation parse_rnn_activation(const std::string& s);  // ConfigError

}  // namespace kws

#endif  // KWS_MODEL_HPP_
