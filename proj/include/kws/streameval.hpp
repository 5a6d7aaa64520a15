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

#ifndef KWS_STREAMEVAL_HPP_
#define KWS_STREAMEVAL_HPP_

#include <functional>
#include <utility>
#include <vector>

#include "kws/audio.hpp"
#include "kws/model.hpp"

namespace kws {

struct StreamConfig {
  double window_s = 1.5;
  double hop_s = 0.1;
  double threshold = 0.5;
  double refractory_s = 1.0;

  // Throws ConfigError when hop_s is nonpositive or exceeds window_s, the
  // threshold leaves [0, 1], or refractory_s is negative.
  void validate() const;
};

struct ScoredWindow {
  double end_s = 0.0;  // window end time
  double score = 0.0;
};

struct StreamResult {
  std::vector<ScoredWindow> windows;
  bool too_short = false;  // clip shorter than one window; windows is empty
};

struct DetectionEvent {
  double time_s = 0.0;  // window end time
  double score = 0.0;
};

// Keyword ground truth over one scored timeline. Spans must be ordered
// within themselves, non-overlapping, and nonnegative; the negative-audio
// total is the keyword-free duration the false-alarm rate is charged to.
struct GroundTruth {
  std::vector<std::pair<double, double>> spans;  // [begin_s, end_s]
  double total_negative_audio_s = 0.0;

  // Throws DataError on malformed or overlapping spans or a negative total.
  void validate() const;
};

struct MatchResult {
  int hits = 0;
  int misses = 0;
  int false_alarms = 0;
  double frr_percent = 0.0;
  double fa_per_hour = 0.0;
};

struct OperatingPoint {
  double threshold = 0.0;
  double fa_per_hour = 0.0;
  double frr_percent = 0.0;
};

struct EvalReport {
  std::vector<OperatingPoint> points;  // descending threshold order
};

// Scores every sliding window of the clip: windows start at 0, hop_s apart,
// and the count is floor((duration - window_s) / hop_s) + 1, computed in
// whole samples so fractional hops cannot drop a window. Each window is cut
// from the waveform and passed to `score_window`. A clip shorter than one
// window yields an empty result with too_short set; the caller decides how
// loudly to warn.
StreamResult stream_windows(
    const AudioClip& clip, const StreamConfig& cfg,
    const std::function<double(const AudioClip&)>& score_window);

// Checkpoint-driven scoring: featurize each window with the checkpoint's
// feature settings, then run the model forward.
StreamResult stream_scores(const AudioClip& clip, const Checkpoint& ckpt,
                           const StreamConfig& cfg);

// Thresholding with a refractory period: emits each window with score >=
// threshold unless it lies within refractory_s after the previously emitted
// event, so consecutive events are separated by more than refractory_s.
// Windows must be time-ordered.
std::vector<DetectionEvent> detect(const std::vector<ScoredWindow>& windows,
                                   double threshold, double refractory_s);

// Greedy matching of detection events to keyword ends. Keywords are visited
// in end-time order and take the earliest unconsumed event within
// [end_s - tol_s, end_s + tol_s]; with equal-width tolerance windows this
// greedy choice attains the maximum possible number of hits. Events within
// tolerance of no keyword at all are false alarms; unmatched events near an
// already-hit keyword count as neither (they sit on keyword audio, not
// negative audio).
//
// FRR% = 100 * misses / (hits + misses), 0 when there are no keywords.
// FA/hr = false_alarms / (total_negative_audio_s / 3600). Throws ConfigError
// on tol_s < 0 and DataError when the truth has neither keywords nor
// negative audio.
MatchResult match_detections(const std::vector<DetectionEvent>& events,
                             const GroundTruth& truth, double tol_s);

// Sweeps the threshold over every distinct window score (descending) plus
// 1.0 and matches at each operating point. The sweep runs with refractory 0
// so every candidate window participates; the refractory period is an
// online-detection concern and would break threshold monotonicity here.
// FA/hr is non-increasing and FRR non-decreasing along the returned points.
EvalReport det_curve(const std::vector<ScoredWindow>& windows,
                     const GroundTruth& truth, double tol_s);

// Minimum FRR among operating points with fa_per_hour <= target; +infinity
// when no point qualifies.
double frr_at_target_fa(const EvalReport& report, double target_fa_per_hour);

}  // namespace kws

#endif  // KWS_STREAMEVAL_HPP_
