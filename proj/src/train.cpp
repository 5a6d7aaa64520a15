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

#include "kws/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "kws/errors.hpp"
#include "kws/rng.hpp"

namespace kws {
namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double act_value(RnnActivation act, double x) {
  if (act == RnnActivation::kRelu) return x > 0.0 ? x : 0.0;
  return std::tanh(x);
}

// Derivative expressed through the activation value (both choices allow it).
inline double act_deriv_from_value(RnnActivation act, double value,
                                   double pre) {
  if (act == RnnActivation::kRelu) return pre > 0.0 ? 1.0 : 0.0;
  return 1.0 - value * value;
}

// Backward through one recurrent direction. d_out is the (T x 2H) gradient
// on the layer output; this direction reads its half at column col_offset.
// Weight gradients land in *gw, input gradients accumulate into *d_in.
void backward_direction(const Mat& seq_in, const DirTrace& tr,
                        const RnnDirWeights& w, CellKind kind,
                        RnnActivation act, int n_hidden, bool reverse,
                        const Mat& d_out, std::size_t col_offset,
                        RnnDirWeights* gw, Mat* d_in) {
  const std::size_t steps = seq_in.rows;
  const int h = n_hidden;
  const int g = kind == CellKind::kGru ? 3 : 4;

  Vec d_h_stream(static_cast<std::size_t>(h), 0.0);
  Vec d_c_stream(static_cast<std::size_t>(h), 0.0);
  Vec d_h(static_cast<std::size_t>(h));
  Vec d_a(static_cast<std::size_t>(g) * h);
  Vec reset_h(static_cast<std::size_t>(h));

  for (std::size_t s = steps; s-- > 0;) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    const double* x = seq_in.data.data() + t * seq_in.cols;
    const double* pre = tr.gates_pre.data.data() + s * tr.gates_pre.cols;
    const double* h_prev =
        s > 0 ? tr.h.data.data() + (s - 1) * tr.h.cols : nullptr;
    const double* d_y = d_out.data.data() + t * d_out.cols + col_offset;
    for (int i = 0; i < h; ++i) d_h[i] = d_h_stream[i] + d_y[i];

    if (kind == CellKind::kGru) {
      // Forward: z=sig(a_z), r=sig(a_r), cand=act(a_c with U_c(r*h_prev)),
      // h = (1-z) h_prev + z cand.
      for (int i = 0; i < h; ++i) {
        const double hp = h_prev ? h_prev[i] : 0.0;
        const double z = sigmoid(pre[i]);
        const double cand = act_value(act, pre[2 * h + i]);
        const double d_cand = d_h[i] * z;
        const double d_z = d_h[i] * (cand - hp);
        d_h_stream[i] = d_h[i] * (1.0 - z);
        d_a[2 * h + i] = d_cand * act_deriv_from_value(act, cand, pre[2 * h + i]);
        d_a[i] = d_z * z * (1.0 - z);
        reset_h[i] = sigmoid(pre[h + i]) * hp;
      }
      // Candidate pre-activation depends on r*h_prev through U_c.
      for (int i = 0; i < h; ++i) {
        double d_rh = 0.0;
        for (int k = 0; k < h; ++k) {
          d_rh += w.w_rec.data[static_cast<std::size_t>(2 * h + k) * h + i] *
                  d_a[2 * h + k];
        }
        const double hp = h_prev ? h_prev[i] : 0.0;
        const double r = sigmoid(pre[h + i]);
        d_h_stream[i] += d_rh * r;
        d_a[h + i] = d_rh * hp * r * (1.0 - r);
      }
      // Update/reset rows act on h_prev directly.
      for (int i = 0; i < h; ++i) {
        double acc = 0.0;
        for (int k = 0; k < 2 * h; ++k) {
          acc += w.w_rec.data[static_cast<std::size_t>(k) * h + i] * d_a[k];
        }
        d_h_stream[i] += acc;
      }
      if (h_prev) {
        for (int k = 0; k < 2 * h; ++k) {
          double* row = gw->w_rec.data.data() + static_cast<std::size_t>(k) * h;
          for (int i = 0; i < h; ++i) row[i] += d_a[k] * h_prev[i];
        }
      }
      for (int k = 0; k < h; ++k) {
        double* row =
            gw->w_rec.data.data() + static_cast<std::size_t>(2 * h + k) * h;
        for (int i = 0; i < h; ++i) row[i] += d_a[2 * h + k] * reset_h[i];
      }
    } else {
      const double* c_row = tr.c.data.data() + s * tr.c.cols;
      const double* c_prev =
          s > 0 ? tr.c.data.data() + (s - 1) * tr.c.cols : nullptr;
      for (int i = 0; i < h; ++i) {
        const double gi = sigmoid(pre[i]);
        const double gf = sigmoid(pre[h + i]);
        const double gg = act_value(act, pre[2 * h + i]);
        const double go = sigmoid(pre[3 * h + i]);
        const double c = c_row[i];
        const double cp = c_prev ? c_prev[i] : 0.0;
        const double squash = act_value(act, c);
        const double d_c = d_c_stream[i] +
                           d_h[i] * go * act_deriv_from_value(act, squash, c);
        d_a[i] = d_c * gg * gi * (1.0 - gi);
        d_a[h + i] = d_c * cp * gf * (1.0 - gf);
        d_a[2 * h + i] = d_c * gi * act_deriv_from_value(act, gg, pre[2 * h + i]);
        d_a[3 * h + i] = d_h[i] * squash * go * (1.0 - go);
        d_c_stream[i] = d_c * gf;
      }
      std::fill(d_h_stream.begin(), d_h_stream.end(), 0.0);
      matvec_t_acc(w.w_rec, d_a.data(), d_h_stream.data());
      if (h_prev) outer_acc(gw->w_rec, d_a.data(), h_prev);
    }

    for (std::size_t i = 0; i < d_a.size(); ++i) gw->bias[i] += d_a[i];
    outer_acc(gw->w_in, d_a.data(), x);
    matvec_t_acc(w.w_in, d_a.data(), d_in->data.data() + t * d_in->cols);
  }
}

Mat backward_layer(const Mat& seq_in, const LayerTrace& tr,
                   const RnnLayerWeights& w, CellKind kind, RnnActivation act,
                   int n_hidden, const Mat& d_out, RnnLayerWeights* gw) {
  Mat d_in(seq_in.rows, seq_in.cols);
  backward_direction(seq_in, tr.fw, w.fw, kind, act, n_hidden, false, d_out, 0,
                     &gw->fw, &d_in);
  backward_direction(seq_in, tr.bw, w.bw, kind, act, n_hidden, true, d_out,
                     static_cast<std::size_t>(n_hidden), &gw->bw, &d_in);
  return d_in;
}

// Conv weight gradients. Mirrors the forward loop structure, including the
// padding arithmetic, so both sides index identically.
void backward_conv(const Mat& x, const Mat& conv_pre, const Mat& d_conv_out,
                   const ModelConfig& cfg, GradSet* g) {
  const ConvShape s = conv_output_shape(cfg);
  const int tot_t = std::max(
      (s.time_out - 1) * cfg.stride_time + cfg.kernel_time - cfg.input_frames,
      0);
  const int tot_f = std::max(
      (s.freq_out - 1) * cfg.stride_freq + cfg.kernel_freq - cfg.input_mels, 0);
  const int lead_t = tot_t / 2;
  const int lead_f = tot_f / 2;
  for (int to = 0; to < s.time_out; ++to) {
    for (int c = 0; c < cfg.n_conv_filters; ++c) {
      double* kern_g =
          g->conv_kernel.data() +
          static_cast<std::size_t>(c) * cfg.kernel_time * cfg.kernel_freq;
      for (int fo = 0; fo < s.freq_out; ++fo) {
        const std::size_t col = static_cast<std::size_t>(c) * s.freq_out + fo;
        if (conv_pre(static_cast<std::size_t>(to), col) <= 0.0) continue;
        const double grad = d_conv_out(static_cast<std::size_t>(to), col);
        g->conv_bias[c] += grad;
        for (int kt = 0; kt < cfg.kernel_time; ++kt) {
          const int ti = to * cfg.stride_time + kt - lead_t;
          if (ti < 0 || ti >= cfg.input_frames) continue;
          for (int kf = 0; kf < cfg.kernel_freq; ++kf) {
            const int fi = fo * cfg.stride_freq + kf - lead_f;
            if (fi < 0 || fi >= cfg.input_mels) continue;
            kern_g[kt * cfg.kernel_freq + kf] +=
                grad * x(static_cast<std::size_t>(fi),
                         static_cast<std::size_t>(ti));
          }
        }
      }
    }
  }
}

void accumulate_example(const ModelConfig& cfg, const Weights& w,
                        const LabeledExample& ex, const ForwardTrace& tr,
                        GradSet* acc) {
  const int y = ex.label;
  // d(CE)/d(logit) for softmax with the keyword class at index 1.
  double d_logits[2] = {tr.probs[0] - (y == 0 ? 1.0 : 0.0),
                        tr.probs[1] - (y == 1 ? 1.0 : 0.0)};

  const std::size_t nf = static_cast<std::size_t>(cfg.fc_units);
  Vec d_fc_out(nf, 0.0);
  for (int k = 0; k < 2; ++k) {
    acc->out_b[k] += d_logits[k];
    const double* row = w.out_w.data.data() + static_cast<std::size_t>(k) * nf;
    double* g_row =
        acc->out_w.data.data() + static_cast<std::size_t>(k) * nf;
    for (std::size_t i = 0; i < nf; ++i) {
      g_row[i] += d_logits[k] * tr.fc_out[i];
      d_fc_out[i] += row[i] * d_logits[k];
    }
  }

  Vec d_fc_pre(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    d_fc_pre[i] = tr.fc_pre[i] > 0.0 ? d_fc_out[i] : 0.0;
    acc->fc_b[i] += d_fc_pre[i];
  }
  const Mat& top = cfg.n_rec_layers > 0 ? tr.layers.back().output : tr.conv_out;
  outer_acc(acc->fc_w, d_fc_pre.data(), top.data.data());

  Mat d_seq(top.rows, top.cols);
  matvec_t_acc(w.fc_w, d_fc_pre.data(), d_seq.data.data());

  for (int l = cfg.n_rec_layers - 1; l >= 0; --l) {
    const Mat& input = l == 0 ? tr.conv_out : tr.layers[l - 1].output;
    d_seq = backward_layer(input, tr.layers[l], w.rnn[l], cfg.cell_kind,
                           cfg.rec_candidate_activation, cfg.rec_hidden, d_seq,
                           &acc->rnn[l]);
  }
  backward_conv(ex.features.values, tr.conv_pre, d_seq, cfg, acc);
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train config: batch_size must be >= 1");
  if (!(lr_final > 0.0) || !(lr_final <= lr_initial)) {
    throw ConfigError("train config: need 0 < lr_final <= lr_initial");
  }
  if (lr_drop_patience < 1) {
    throw ConfigError("train config: lr_drop_patience must be >= 1");
  }
  if (max_epochs < 1) throw ConfigError("train config: max_epochs must be >= 1");
  if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 ||
      adam_beta2 >= 1.0 || !(adam_eps > 0.0)) {
    throw ConfigError("train config: invalid adam constants");
  }
  if (early_stop_ce < 0.0) {
    throw ConfigError("train config: early_stop_ce must be >= 0");
  }
}

AdamState make_adam_state(const ModelConfig& cfg) {
  AdamState st;
  st.m = alloc_weights(cfg);
  st.v = alloc_weights(cfg);
  st.t = 0;
  return st;
}

double ce_loss(double p, int label) {
  const double lo = 1e-12;
  const double clamped = std::min(1.0 - lo, std::max(lo, p));
  return label == 1 ? -std::log(clamped) : -std::log(1.0 - clamped);
}

BackwardResult backward(const ModelConfig& cfg, const Weights& w,
                        const std::vector<LabeledExample>& batch) {
  if (batch.empty()) throw ConfigError("backward: empty batch");
  BackwardResult res;
  res.grads = alloc_weights(cfg);
  double loss_sum = 0.0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const ForwardTrace tr = model_forward_trace(batch[k].features, cfg, w);
    const double loss = ce_loss(tr.score, batch[k].label);
    if (!std::isfinite(loss)) {
      throw NumericError("non-finite loss at batch index " +
                         std::to_string(k));
    }
    loss_sum += loss;
    accumulate_example(cfg, w, batch[k], tr, &res.grads);
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (auto [p, n] : tensor_views(res.grads)) {
    for (std::size_t i = 0; i < n; ++i) p[i] *= scale;
  }
  res.mean_loss = loss_sum * scale;
  return res;
}

void adam_step(Weights* w, const GradSet& g, AdamState* st, double lr,
               double beta1, double beta2, double eps) {
  st->t += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(st->t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(st->t));
  auto wv = tensor_views(*w);
  auto gv = tensor_views(g);
  auto mv = tensor_views(st->m);
  auto vv = tensor_views(st->v);
  if (wv.size() != gv.size()) throw DimensionError("adam_step: shape mismatch");
  for (std::size_t k = 0; k < wv.size(); ++k) {
    auto [wp, n] = wv[k];
    if (gv[k].second != n || mv[k].second != n || vv[k].second != n) {
      throw DimensionError("adam_step: shape mismatch");
    }
    const double* gp = gv[k].first;
    double* mp = mv[k].first;
    double* vp = vv[k].first;
    for (std::size_t i = 0; i < n; ++i) {
      mp[i] = beta1 * mp[i] + (1.0 - beta1) * gp[i];
      vp[i] = beta2 * vp[i] + (1.0 - beta2) * gp[i] * gp[i];
      const double m_hat = mp[i] / bc1;
      const double v_hat = vp[i] / bc2;
      wp[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

namespace {

double mean_dev_loss(const ModelConfig& cfg, const Weights& w,
                     const std::vector<LabeledExample>& dev) {
  double sum = 0.0;
  for (const auto& ex : dev) {
    sum += ce_loss(model_forward_trace(ex.features, cfg, w).score, ex.label);
  }
  return sum / static_cast<double>(dev.size());
}

}  // namespace

TrainResult train_loop(const ModelConfig& mcfg, const FeatureConfig& fcfg,
                       const TrainConfig& tcfg, const TrainDataset& data) {
  mcfg.validate();
  fcfg.validate();
  tcfg.validate();
  if (data.n_train == 0 || !data.train) {
    throw ConfigError("train: empty training set");
  }
  if (data.dev.empty()) throw ConfigError("train: empty dev set");

  Rng init_rng(tcfg.seed);
  Weights w = init_weights(mcfg, init_rng);
  AdamState adam = make_adam_state(mcfg);
  double lr = tcfg.lr_initial;

  TrainResult res;
  res.best.config = mcfg;
  res.best.feature = fcfg;
  double best_dev = std::numeric_limits<double>::infinity();
  int stale_epochs = 0;
  bool dropped = false;
  int step = 0;

  std::vector<std::size_t> order(data.n_train);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= tcfg.max_epochs; ++epoch) {
    Rng shuffle_rng(Rng::derive(tcfg.seed, static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);

    std::vector<LabeledExample> epoch_examples;
    epoch_examples.reserve(data.n_train);
    for (std::size_t i = 0; i < data.n_train; ++i) {
      epoch_examples.push_back(data.train(epoch, i));
    }

    double train_loss_sum = 0.0;
    int batches = 0;
    std::vector<LabeledExample> batch;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(tcfg.batch_size)) {
      const std::size_t stop = std::min(
          order.size(), start + static_cast<std::size_t>(tcfg.batch_size));
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) {
        batch.push_back(epoch_examples[order[i]]);
      }
      BackwardResult bw = backward(mcfg, w, batch);
      adam_step(&w, bw.grads, &adam, lr, tcfg.adam_beta1, tcfg.adam_beta2,
                tcfg.adam_eps);
      train_loss_sum += bw.mean_loss;
      ++batches;
      ++step;
    }

    const double train_loss = train_loss_sum / std::max(1, batches);
    const double dev_loss = mean_dev_loss(mcfg, w, data.dev);
    res.metrics.push_back({epoch, step, train_loss, dev_loss, lr});

    if (dev_loss < best_dev) {
      best_dev = dev_loss;
      stale_epochs = 0;
      res.best.weights = w;
      res.best.metadata["epoch"] = std::to_string(epoch);
      res.best.metadata["step"] = std::to_string(step);
      res.best.metadata["seed"] = std::to_string(tcfg.seed);
      res.best.metadata["dev_loss"] = std::to_string(dev_loss);
    } else {
      ++stale_epochs;
      if (!dropped && stale_epochs >= tcfg.lr_drop_patience) {
        lr = tcfg.lr_final;
        dropped = true;
        stale_epochs = 0;
      }
    }

    if (tcfg.early_stop_ce > 0.0) {
      double ce_sum = 0.0;
      std::size_t correct = 0;
      for (const auto& ex : epoch_examples) {
        const double p = model_forward_trace(ex.features, mcfg, w).score;
        ce_sum += ce_loss(p, ex.label);
        correct += ((p >= 0.5) == (ex.label == 1)) ? 1 : 0;
      }
      res.final_train_accuracy =
          static_cast<double>(correct) / static_cast<double>(data.n_train);
      res.final_train_ce = ce_sum / static_cast<double>(data.n_train);
      if (res.final_train_accuracy == 1.0 &&
          res.final_train_ce < tcfg.early_stop_ce) {
        res.total_steps = step;
        return res;
      }
    } else if (epoch == tcfg.max_epochs) {
      double ce_sum = 0.0;
      std::size_t correct = 0;
      for (const auto& ex : epoch_examples) {
        const double p = model_forward_trace(ex.features, mcfg, w).score;
        ce_sum += ce_loss(p, ex.label);
        correct += ((p >= 0.5) == (ex.label == 1)) ? 1 : 0;
      }
      res.final_train_accuracy =
          static_cast<double>(correct) / static_cast<double>(data.n_train);
      res.final_train_ce = ce_sum / static_cast<double>(data.n_train);
    }
  }
  res.total_steps = step;
  return res;
}

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write metrics log: " + path);
  out << "epoch,step,train_loss,dev_loss,lr\n";
  out.precision(17);
  for (const auto& r : rows) {
    out << r.epoch << ',' << r.step << ',' << r.train_loss << ',' << r.dev_loss
        << ',' << r.lr << '\n';
  }
  if (!out.good()) throw IoError("failed writing metrics log: " + path);
}

MiningResult mine_hard_negatives(const WindowScorer& scorer,
                                 const std::vector<std::string>& paths,
                                 double threshold, int cap_per_file,
                                 double window_s) {
  if (cap_per_file < 0) {
    throw ConfigError("mine: cap_per_file must be >= 0");
  }
  MiningResult res;
  for (const auto& path : paths) {
    std::vector<std::pair<double, double>> scored;
    try {
      scored = scorer(path);
    } catch (const Error&) {
      ++res.files_skipped;
      continue;
    }
    std::vector<MinedWindow> file_hits;
    for (const auto& [end_s, score] : scored) {
      if (score >= threshold) {
        file_hits.push_back({path, end_s - window_s, score});
      }
    }
    std::stable_sort(file_hits.begin(), file_hits.end(),
                     [](const MinedWindow& a, const MinedWindow& b) {
                       return a.score > b.score;
                     });
    if (file_hits.size() > static_cast<std::size_t>(cap_per_file)) {
      file_hits.resize(static_cast<std::size_t>(cap_per_file));
    }
    res.mined.insert(res.mined.end(), file_hits.begin(), file_hits.end());
  }
  return res;
}

}  // namespace kws
