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

// Command-line front end. Exit codes: 0 on success, 1 for usage and
// configuration problems, 2 for data problems (unreadable or malformed
// inputs, numeric failures).

#include <algorithm>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kws/align.hpp"
#include "kws/audio.hpp"
#include "kws/config.hpp"
#include "kws/errors.hpp"
#include "kws/features.hpp"
#include "kws/manifest.hpp"
#include "kws/model.hpp"
#include "kws/pipeline.hpp"
#include "kws/streameval.hpp"
#include "kws/synth.hpp"
#include "kws/train.hpp"
#include "kws/version.hpp"

namespace {

namespace fs = std::filesystem;

kws::CliConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return kws::CliConfig{};
  return kws::load_cli_config(path);
}

std::string out_dir_for(const kws::CliConfig& cfg,
                        const std::string& out_flag) {
  if (!out_flag.empty()) return out_flag;
  if (!cfg.paths.out_dir.empty()) return cfg.paths.out_dir;
  return ".";
}

kws::Checkpoint load_required_checkpoint(const kws::CliConfig& cfg) {
  if (cfg.paths.checkpoint.empty()) {
    throw kws::ConfigError("paths.checkpoint is not set");
  }
  return kws::load_checkpoint(cfg.paths.checkpoint);
}

void write_det_csv(const std::string& path, const kws::EvalReport& det) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw kws::IoError("cannot write: " + path);
  out << "threshold,fa_per_hour,frr_percent\n";
  char buf[96];
  for (const kws::OperatingPoint& p : det.points) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g\n", p.threshold,
                  p.fa_per_hour, p.frr_percent);
    out << buf;
  }
  if (!out) throw kws::IoError("cannot write: " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"keyword spotting with a convolutional recurrent network"};
  app.set_version_flag("--version", kws::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string input_path;
  std::string posts_path;
  int workers = 1;
  int count = 64;
  int cap_per_file = 10;
  std::uint64_t seed = 1;
  double threshold = 0.5;
  double alpha = 0.5;
  double snr_low = 0.0;
  double snr_high = 0.0;

  auto* cmd_featurize =
      app.add_subcommand("featurize", "compute features for one WAV file");
  cmd_featurize->add_option("input", input_path, "input WAV file")
      ->required();
  cmd_featurize->add_option("--config", config_path, "JSON config file");
  cmd_featurize->add_option("--out", out_path,
                            "output path (default: input with .fmat)");
  cmd_featurize->callback([&] {
    const kws::CliConfig cfg = load_config_or_default(config_path);
    const kws::FeatureMatrix m =
        kws::featurize(kws::load_wav(input_path), cfg.feature);
    const std::string out =
        out_path.empty()
            ? fs::path(input_path).replace_extension(".fmat").string()
            : out_path;
    kws::save_fmat(out, m);
    std::printf("%s: %zu mels x %zu frames\n", out.c_str(), m.n_mels(),
                m.n_frames());
  });

  auto* cmd_align = app.add_subcommand(
      "align", "locate the keyword span in a posterior file");
  cmd_align->add_option("input", input_path, "posterior .cpst file")
      ->required();
  cmd_align->add_option("--config", config_path, "JSON config file");
  auto* align_alpha =
      cmd_align->add_option("--alpha", alpha, "suppression factor override");
  cmd_align->add_option("--out", out_path, "write the span as JSON");
  cmd_align->callback([&] {
    kws::CliConfig cfg = load_config_or_default(config_path);
    if (align_alpha->count() > 0) cfg.align.alpha = alpha;
    const kws::CharPosteriorMatrix posts = kws::smooth_scores(
        kws::load_cpst(input_path), cfg.align.smooth_window);
    const kws::AlignmentSpan span = kws::align_keyword(posts, cfg.align);
    std::printf("span: frames [%d, %d] seconds [%.3f, %.3f] %s\n",
                span.begin_frame, span.end_frame, span.begin_s, span.end_s,
                span.ordered ? "ordered" : "unordered");
    if (!out_path.empty()) {
      nlohmann::json j;
      j["begin_frame"] = span.begin_frame;
      j["end_frame"] = span.end_frame;
      j["begin_s"] = span.begin_s;
      j["end_s"] = span.end_s;
      j["ordered"] = span.ordered;
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw kws::IoError("cannot write: " + out_path);
      out << j.dump(2) << "\n";
    }
  });

  auto* cmd_chop = app.add_subcommand(
      "chop", "cut the aligned keyword out of a recording");
  cmd_chop->add_option("input", input_path, "input WAV file")->required();
  cmd_chop->add_option("posteriors", posts_path, "posterior .cpst file")
      ->required();
  cmd_chop->add_option("--config", config_path, "JSON config file");
  auto* chop_alpha =
      cmd_chop->add_option("--alpha", alpha, "suppression factor override");
  cmd_chop->add_option("--out", out_path, "output WAV path")->required();
  cmd_chop->callback([&] {
    kws::CliConfig cfg = load_config_or_default(config_path);
    if (chop_alpha->count() > 0) cfg.align.alpha = alpha;
    const kws::AudioClip clip = kws::load_wav(input_path);
    const kws::CharPosteriorMatrix posts = kws::smooth_scores(
        kws::load_cpst(posts_path), cfg.align.smooth_window);
    const kws::AlignmentSpan span = kws::align_keyword(posts, cfg.align);
    const kws::AudioClip chopped =
        kws::chop_keyword(clip, span, cfg.align.pad_s);
    kws::save_wav(out_path, chopped);
    std::printf("%s: %.3f s\n", out_path.c_str(), chopped.duration_s());
  });

  auto* cmd_augment = app.add_subcommand(
      "augment", "materialize augmented training features");
  cmd_augment->add_option("--config", config_path, "JSON config file")
      ->required();
  cmd_augment->add_option("--count", count, "examples to generate");
  cmd_augment->add_option("--workers", workers, "parallel workers");
  cmd_augment->add_option("--out", out_path, "output directory");
  auto* aug_seed =
      cmd_augment->add_option("--seed", seed, "augmentation seed override");
  auto* aug_low =
      cmd_augment->add_option("--snr-low", snr_low, "SNR range low (dB)");
  auto* aug_high =
      cmd_augment->add_option("--snr-high", snr_high, "SNR range high (dB)");
  cmd_augment->callback([&] {
    kws::CliConfig cfg = load_config_or_default(config_path);
    if (aug_seed->count() > 0) cfg.augment.rng_seed = seed;
    if (aug_low->count() > 0) cfg.augment.snr_db_low = snr_low;
    if (aug_high->count() > 0) cfg.augment.snr_db_high = snr_high;
    cfg.augment.validate();
    const std::string dir = out_dir_for(cfg, out_path);
    const std::vector<kws::AugmentRow> rows =
        kws::materialize_augmented(cfg, count, dir, workers);
    kws::write_augment_csv((fs::path(dir) / "augmented.csv").lexically_normal().string(), rows);
    const auto positives = std::count_if(
        rows.begin(), rows.end(),
        [](const kws::AugmentRow& r) { return r.label == 1; });
    std::printf("%zu examples (%lld positive) in %s\n", rows.size(),
                static_cast<long long>(positives), dir.c_str());
  });

  auto* cmd_train =
      app.add_subcommand("train", "train a detector from a manifest");
  cmd_train->add_option("--config", config_path, "JSON config file")
      ->required();
  auto* train_seed =
      cmd_train->add_option("--seed", seed, "training seed override");
  auto* train_out =
      cmd_train->add_option("--out", out_path, "output directory override");
  cmd_train->callback([&] {
    kws::CliConfig cfg = load_config_or_default(config_path);
    if (train_seed->count() > 0) {
      cfg.train.seed = seed;
      cfg.augment.rng_seed = seed;
    }
    const kws::TrainResult result = kws::train_from_manifest(cfg);
    const std::string dir = out_dir_for(cfg, out_path);
    fs::create_directories(dir);
    const std::string ckpt_path =
        (train_out->count() == 0 && !cfg.paths.checkpoint.empty())
            ? cfg.paths.checkpoint
            : (fs::path(dir) / "model.ckws").lexically_normal().string();
    kws::save_checkpoint(result.best, ckpt_path);
    kws::write_metrics_csv((fs::path(dir) / "metrics.csv").lexically_normal().string(),
                           result.metrics);
    double best_dev = std::numeric_limits<double>::infinity();
    for (const kws::MetricsRow& row : result.metrics) {
      best_dev = std::min(best_dev, row.dev_loss);
    }
    std::printf(
        "epochs %zu, steps %d, train accuracy %.1f%%, train CE %.4f, "
        "best dev CE %.4f\n",
        result.metrics.size(), result.total_steps,
        100.0 * result.final_train_accuracy, result.final_train_ce,
        best_dev);
    std::printf("checkpoint: %s\n", ckpt_path.c_str());
  });

  auto* cmd_mine = app.add_subcommand(
      "mine", "collect hard negative windows from keyword-free audio");
  cmd_mine->add_option("--config", config_path, "JSON config file")
      ->required();
  auto* mine_threshold =
      cmd_mine->add_option("--threshold", threshold, "score threshold");
  cmd_mine->add_option("--workers", workers, "parallel workers");
  cmd_mine->add_option("--cap", cap_per_file, "max windows per file");
  cmd_mine->add_option("--out", out_path, "output manifest path");
  cmd_mine->callback([&] {
    kws::CliConfig cfg = load_config_or_default(config_path);
    if (mine_threshold->count() > 0) cfg.stream.threshold = threshold;
    const kws::Checkpoint ckpt = load_required_checkpoint(cfg);
    const kws::MiningResult mined =
        kws::mine_from_manifest(cfg, ckpt, workers, cap_per_file);
    const std::string out =
        out_path.empty()
            ? (fs::path(out_dir_for(cfg, "")) / "hard_negatives.jsonl")
                  .lexically_normal()
                  .string()
            : out_path;
    fs::create_directories(fs::path(out).parent_path().empty()
                               ? "."
                               : fs::path(out).parent_path().string());
    kws::save_manifest(out, kws::mined_to_entries(mined));
    std::printf("%zu hard negatives (%d files skipped): %s\n",
                mined.mined.size(), mined.files_skipped, out.c_str());
  });

  auto* cmd_eval = app.add_subcommand(
      "eval", "score an evaluation manifest and report detection metrics");
  cmd_eval->add_option("--config", config_path, "JSON config file")
      ->required();
  auto* eval_threshold =
      cmd_eval->add_option("--threshold", threshold, "operating threshold");
  cmd_eval->add_option("--workers", workers, "parallel workers");
  cmd_eval->add_option("--out", out_path, "output directory");
  cmd_eval->callback([&] {
    kws::CliConfig cfg = load_config_or_default(config_path);
    if (eval_threshold->count() > 0) cfg.stream.threshold = threshold;
    const kws::Checkpoint ckpt = load_required_checkpoint(cfg);
    const kws::EvalSummary s =
        kws::evaluate_from_manifest(cfg, ckpt, workers);
    const std::string dir = out_dir_for(cfg, out_path);
    fs::create_directories(dir);
    const std::string det_path = (fs::path(dir) / "det.csv").lexically_normal().string();
    write_det_csv(det_path, s.det);
    std::printf("clips %d (%d too short), keywords %d, negative audio %.1f s\n",
                s.n_files, s.n_too_short, s.n_keywords, s.negative_audio_s);
    std::printf("threshold %.3f: FRR %.2f%% (%d/%d), FA/hr %.3f (%d events)\n",
                cfg.stream.threshold, s.at_threshold.frr_percent,
                s.at_threshold.hits,
                s.at_threshold.hits + s.at_threshold.misses,
                s.at_threshold.fa_per_hour, s.at_threshold.false_alarms);
    std::printf("FRR at 1.0 FA/hr: %.2f%%\n", s.frr_at_fa1);
    std::printf("FRR at 0.5 FA/hr: %.2f%%\n", s.frr_at_fa05);
    std::printf("DET curve (%zu points): %s\n", s.det.points.size(),
                det_path.c_str());
  });

  auto* cmd_detect = app.add_subcommand(
      "detect", "run the detector over one WAV file and print events");
  cmd_detect->add_option("input", input_path, "input WAV file")->required();
  cmd_detect->add_option("--config", config_path, "JSON config file")
      ->required();
  auto* detect_threshold =
      cmd_detect->add_option("--threshold", threshold, "score threshold");
  cmd_detect->callback([&] {
    kws::CliConfig cfg = load_config_or_default(config_path);
    if (detect_threshold->count() > 0) cfg.stream.threshold = threshold;
    const kws::Checkpoint ckpt = load_required_checkpoint(cfg);
    const kws::AudioClip clip = kws::load_wav(input_path);
    const kws::StreamResult scored =
        kws::stream_scores(clip, ckpt, cfg.stream);
    if (scored.too_short) {
      std::printf("clip shorter than one %.2f s window, no scores\n",
                  cfg.stream.window_s);
      return;
    }
    const std::vector<kws::DetectionEvent> events = kws::detect(
        scored.windows, cfg.stream.threshold, cfg.stream.refractory_s);
    for (const kws::DetectionEvent& e : events) {
      std::printf("%8.2f  %.4f\n", e.time_s, e.score);
    }
    std::printf("%zu detections in %.2f s\n", events.size(),
                clip.duration_s());
  });

  auto* cmd_sweep = app.add_subcommand(
      "sweep", "parameter and MAC accounting for the published architectures");
  cmd_sweep->add_option("--out", out_path, "also write the table as CSV");
  cmd_sweep->callback([&] {
    const std::vector<kws::SweepRow> rows = kws::table1_sweep();
    std::printf(
        "  NC  LT  LF  ST  SF  R  NR cell    NF     exact   printed   delta"
        "       MACs\n");
    int reconciled = 0;
    for (const kws::SweepRow& row : rows) {
      const kws::ModelConfig& c = row.config;
      std::printf(
          "%4d %3d %3d %3d %3d %2d %3d %-6s %3d %9" PRIu64 " %9" PRIu64
          " %+7lld %10" PRIu64 "%s\n",
          c.n_conv_filters, c.kernel_time, c.kernel_freq, c.stride_time,
          c.stride_freq, c.n_rec_layers, c.rec_hidden,
          kws::to_string(c.cell_kind), c.fc_units, row.exact_params,
          row.printed_params, row.delta, row.macs,
          row.reconciled ? "" : "  *");
      if (row.reconciled) ++reconciled;
    }
    std::printf("%d/%zu rows within 1000 of the printed count\n", reconciled,
                rows.size());
    for (const kws::SweepRow& row : rows) {
      if (row.reconciled) continue;
      std::printf("  * printed %" PRIu64 " vs exact %" PRIu64
                  " (delta %+lld)\n",
                  row.printed_params, row.exact_params, row.delta);
    }
    const kws::ModelConfig deployed;
    std::printf("deployed architecture: %" PRIu64 " parameters, %" PRIu64
                " MACs per window\n",
                kws::param_count(deployed),
                kws::flops_estimate(deployed).macs);
    if (!out_path.empty()) {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw kws::IoError("cannot write: " + out_path);
      out << "nc,lt,lf,st,sf,r,nr,cell,nf,exact,printed,delta,macs\n";
      for (const kws::SweepRow& row : rows) {
        const kws::ModelConfig& c = row.config;
        out << c.n_conv_filters << ',' << c.kernel_time << ','
            << c.kernel_freq << ',' << c.stride_time << ',' << c.stride_freq
            << ',' << c.n_rec_layers << ',' << c.rec_hidden << ','
            << kws::to_string(c.cell_kind) << ',' << c.fc_units << ','
            << row.exact_params << ',' << row.printed_params << ','
            << row.delta << ',' << row.macs << '\n';
      }
    }
  });

  auto* cmd_synth = app.add_subcommand(
      "synth", "write the synthetic two-tone fixture dataset");
  cmd_synth->add_option("--out", out_path, "output directory")->required();
  cmd_synth->add_option("--seed", seed, "generation seed");
  cmd_synth->callback([&] {
    const kws::ToyDataset ds = kws::write_toy_dataset(out_path, seed);
    std::printf("train manifest: %s\n", ds.train_manifest.c_str());
    std::printf("eval manifest:  %s\n", ds.eval_manifest.c_str());
    std::printf("config:         %s\n", ds.config.c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const kws::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const kws::UnsupportedError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const kws::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
