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

#include "kws/streameval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "kws/errors.hpp"
#include "kws/features.hpp"

namespace kws {

void StreamConfig::validate() const {
  if (!(hop_s > 0.0)) throw ConfigError("stream hop_s must be > 0");
  if (!(hop_s <= window_s)) {
    throw ConfigError("stream hop_s must not exceed window_s");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ConfigError("stream threshold must lie in [0, 1]");
  }
  if (!(refractory_s >= 0.0)) {
    throw ConfigError("stream refractory_s must be >= 0");
  }
}

void GroundTruth::validate() const {
  if (!(total_negative_audio_s >= 0.0)) {
    throw DataError("negative audio total must be >= 0");
  }
  auto sorted = spans;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!(sorted[i].first >= 0.0) || !(sorted[i].second >= sorted[i].first)) {
      throw DataError("malformed keyword span");
    }
    if (i > 0 && sorted[i].first < sorted[i - 1].second) {
      throw DataError("overlapping keyword spans");
    }
  }
}

StreamResult stream_windows(
    const AudioClip& clip, const StreamConfig& cfg,
    const std::function<double(const AudioClip&)>& score_window) {
  cfg.validate();
  StreamResult out;
  // Whole-sample arithmetic; floor((dur - window) / hop) + 1 evaluated on
  // doubles can lose the last window to rounding.
  const auto window =
      static_cast<long long>(std::llround(cfg.window_s * clip.sample_rate));
  const auto hop =
      static_cast<long long>(std::llround(cfg.hop_s * clip.sample_rate));
  const auto n = static_cast<long long>(clip.samples.size());
  if (n < window) {
    out.too_short = true;
    return out;
  }
  const long long count = (n - window) / hop + 1;
  out.windows.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    const long long begin = i * hop;
    AudioClip piece;
    piece.sample_rate = clip.sample_rate;
    piece.samples.assign(
        clip.samples.begin() + static_cast<std::ptrdiff_t>(begin),
        clip.samples.begin() + static_cast<std::ptrdiff_t>(begin + window));
    ScoredWindow w;
    w.end_s = static_cast<double>(begin + window) / clip.sample_rate;
    w.score = score_window(piece);
    out.windows.push_back(w);
  }
  return out;
}

StreamResult stream_scores(const AudioClip& clip, const Checkpoint& ckpt,
                           const StreamConfig& cfg) {
  return stream_windows(clip, cfg, [&ckpt](const AudioClip& window) {
    return model_forward(featurize(window, ckpt.feature), ckpt);
  });
}

std::vector<DetectionEvent> detect(const std::vector<ScoredWindow>& windows,
                                   double threshold, double refractory_s) {
  std::vector<DetectionEvent> events;
  double last = -std::numeric_limits<double>::infinity();
  for (const ScoredWindow& w : windows) {
    if (w.score < threshold) continue;
    if (w.end_s - last <= refractory_s) continue;
    events.push_back({w.end_s, w.score});
    last = w.end_s;
  }
  return events;
}

MatchResult match_detections(const std::vector<DetectionEvent>& events,
                             const GroundTruth& truth, double tol_s) {
  if (!(tol_s >= 0.0)) throw ConfigError("match tolerance must be >= 0");
  truth.validate();
  if (truth.spans.empty() && truth.total_negative_audio_s == 0.0) {
    throw DataError("evaluation set has no keywords and no negative audio");
  }

  std::vector<double> times;
  times.reserve(events.size());
  for (const DetectionEvent& e : events) times.push_back(e.time_s);
  std::sort(times.begin(), times.end());

  std::vector<double> ends;
  ends.reserve(truth.spans.size());
  for (const auto& span : truth.spans) ends.push_back(span.second);
  std::sort(ends.begin(), ends.end());

  MatchResult r;
  std::vector<bool> consumed(times.size(), false);
  for (const double end : ends) {
    bool hit = false;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (consumed[i] || std::abs(times[i] - end) > tol_s) continue;
      consumed[i] = true;
      hit = true;
      break;
    }
    r.hits += hit;
    r.misses += !hit;
  }
  for (const double t : times) {
    bool near_keyword = false;
    for (const double end : ends) {
      if (std::abs(t - end) <= tol_s) {
        near_keyword = true;
        break;
      }
    }
    r.false_alarms += !near_keyword;
  }

  r.frr_percent = ends.empty()
                      ? 0.0
                      : 100.0 * r.misses / static_cast<double>(ends.size());
  if (truth.total_negative_audio_s > 0.0) {
    r.fa_per_hour = r.false_alarms / (truth.total_negative_audio_s / 3600.0);
  } else {
    r.fa_per_hour = r.false_alarms > 0
                        ? std::numeric_limits<double>::infinity()
                        : 0.0;
  }
  return r;
}

EvalReport det_curve(const std::vector<ScoredWindow>& windows,
                     const GroundTruth& truth, double tol_s) {
  std::set<double, std::greater<double>> thresholds;
  for (const ScoredWindow& w : windows) thresholds.insert(w.score);
  thresholds.insert(1.0);

  EvalReport report;
  report.points.reserve(thresholds.size());
  for (const double thr : thresholds) {
    const MatchResult m = match_detections(detect(windows, thr, 0.0), truth,
                                           tol_s);
    report.points.push_back({thr, m.fa_per_hour, m.frr_percent});
  }
  return report;
}

double frr_at_target_fa(const EvalReport& report, double target_fa_per_hour) {
  double best = std::numeric_limits<double>::infinity();
  for (const OperatingPoint& p : report.points) {
    if (p.fa_per_hour <= target_fa_per_hour) {
      best = std::min(best, p.frr_percent);
    }
  }
  return best;
}

}  // namespace kws
