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

#ifndef KWS_TRAIN_HPP_
#define KWS_TRAIN_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kws/features.hpp"
#include "kws/model.hpp"

namespace kws {

struct TrainConfig {
  int batch_size = 64;
  double lr_initial = 0.001;
  double lr_final = 0.0003;    // applied after the single schedule drop
  int lr_drop_patience = 3;    // epochs without dev improvement before drop
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int max_epochs = 30;
  std::uint64_t seed = 1;
  // When > 0, training stops once an epoch reaches 100% train accuracy with
  // mean CE below this value.
  double early_stop_ce = 0.0;

  void validate() const;  // ConfigError
};

struct LabeledExample {
  FeatureMatrix features;
  int label = 0;  // 1 = window contains the keyword
};

// Optimizer accumulators, same shapes as the weights.
struct AdamState {
  GradSet m;
  GradSet v;
  std::int64_t t = 0;
};

AdamState make_adam_state(const ModelConfig& cfg);

// Cross-entropy of a keyword posterior against a binary label. p is clamped
// to [1e-12, 1-1e-12] before the logs.
double ce_loss(double p, int label);

struct BackwardResult {
  double mean_loss = 0.0;
  GradSet grads;
};

// Mean CE loss over the batch and its exact gradient for every weight,
// reverse-mode through softmax, FC, the bidirectional recurrences, ReLU and
// the strided padded convolution. The ReLU subgradient at 0 is taken as 0.
// Throws NumericError naming the batch index whose loss is non-finite.
BackwardResult backward(const ModelConfig& cfg, const Weights& w,
                        const std::vector<LabeledExample>& batch);

// In-place Adam update: m <- b1 m + (1-b1) g, v <- b2 v + (1-b2) g^2, then
// theta -= lr * m_hat / (sqrt(v_hat) + eps) with bias-corrected m_hat, v_hat.
void adam_step(Weights* w, const GradSet& g, AdamState* st, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

// Training data source. `train` must be a pure function of (epoch, index) so
// runs are reproducible regardless of batch scheduling; augmentation that
// varies per epoch lives behind it.
struct TrainDataset {
  std::size_t n_train = 0;
  std::function<LabeledExample(int epoch, std::size_t index)> train;
  std::vector<LabeledExample> dev;
};

struct MetricsRow {
  int epoch = 0;
  int step = 0;  // cumulative optimizer steps at epoch end
  double train_loss = 0.0;
  double dev_loss = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  Checkpoint best;  // lowest dev loss seen
  std::vector<MetricsRow> metrics;
  int total_steps = 0;
  double final_train_accuracy = 0.0;  // fraction in [0, 1], last epoch
  double final_train_ce = 0.0;
};

// Epochs of shuffled minibatches with Adam. The learning rate starts at
// lr_initial and drops once to lr_final after lr_drop_patience consecutive
// epochs without a dev-loss improvement. Fully deterministic for a fixed
// seed. Throws ConfigError when the dataset is empty.
TrainResult train_loop(const ModelConfig& mcfg, const FeatureConfig& fcfg,
                       const TrainConfig& tcfg, const TrainDataset& data);

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRow>& rows);

// Hard negative mining over a keyword-free corpus.
struct MinedWindow {
  std::string path;
  double offset_s = 0.0;  // window start within the file
  double score = 0.0;
};

struct MiningResult {
  std::vector<MinedWindow> mined;
  int files_skipped = 0;
};

// Scores one file and returns (window_end_s, score) pairs; typically wraps
// stream_scores over a checkpoint, or a stub in tests.
using WindowScorer =
    std::function<std::vector<std::pair<double, double>>(const std::string&)>;

// Collects windows scoring >= threshold, per file highest score first and
// capped at cap_per_file. Files whose scorer throws are counted and skipped.
MiningResult mine_hard_negatives(const WindowScorer& scorer,
                                 const std::vector<std::string>& paths,
                                 double threshold, int cap_per_file,
                                 double window_s);

}  // namespace kws

#endif  // KWS_TRAIN_HPP_
