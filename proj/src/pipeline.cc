// src/pipeline.cc

// Copyright 2025  DSRKit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "dsr/pipeline.h"

#include <omp.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "dsr/wav_io.h"

namespace dsr {

namespace {

TfMask class_mask(const Masks& masks, int k) {
  TfMask m(masks.frames, masks.bins);
  for (int t = 0; t < masks.frames; ++t)
    for (int f = 0; f < masks.bins; ++f) m(t, f) = masks.at(k, t, f);
  return m;
}

// uniform split of each frame's mass over its active classes (the noise
// class counts as one); the single-channel fallback where no spatial model
// can be fitted
TfMask activity_mask(const ActivityGrid& grid, int bins) {
  TfMask m = TfMask::Zero(grid.num_frames, bins);
  for (int t = 0; t < grid.num_frames; ++t) {
    double active = 1.0;  // noise class
    for (int k = 0; k < grid.num_speakers(); ++k) active += grid.active(k, t) ? 1.0 : 0.0;
    const double v = grid.active(grid.target_row, t) ? 1.0 / active : 0.0;
    for (int f = 0; f < bins; ++f) m(t, f) = v;
  }
  return m;
}

void append_count_flag(std::vector<std::string>& flags, const std::string& name,
                       std::size_t count) {
  if (count > 0) flags.push_back(name + "=" + std::to_string(count));
}

}  // namespace

void PipelineConfig::validate() const {
  if (context_secs < 0.0)
    throw std::invalid_argument("PipelineConfig: context_secs must be >= 0");
  if (keep_fraction <= 0.0 || keep_fraction > 1.0)
    throw std::invalid_argument("PipelineConfig: keep_fraction must be in (0, 1]");
  if (taps < 1) throw std::invalid_argument("PipelineConfig: taps must be >= 1");
  stft.validate();
  wpe.validate();
  cacgmm.validate();
  ev.validate();
}

PipelineConfig::Variant PipelineConfig::parse_variant(const std::string& name) {
  if (name == "gss") return Variant::kGss;
  if (name == "gss-postfilter") return Variant::kGssPostfilter;
  if (name == "cwmwf-cban") return Variant::kCwmwfCban;
  throw std::invalid_argument("unknown variant: " + name +
                              " (expected gss | gss-postfilter | cwmwf-cban)");
}

std::string PipelineConfig::variant_name(Variant v) {
  switch (v) {
    case Variant::kGss: return "gss";
    case Variant::kGssPostfilter: return "gss-postfilter";
    case Variant::kCwmwfCban: return "cwmwf-cban";
  }
  return "?";
}

EnhanceResult beamform_with_masks(const Spectrogram& wped, const TfMask& target_mask,
                                  const CoreRegion& core, const PipelineConfig& cfg,
                                  std::size_t out_samples, SegmentDebug* debug,
                                  const TfMask* postfilter_mask) {
  EnhanceResult result;
  const int frames = wped.num_frames();
  const int bins = wped.num_bins();
  if (target_mask.rows() != frames || target_mask.cols() != bins)
    throw std::invalid_argument("beamform_with_masks: mask shape mismatch");
  if (core.frame_begin < 0 || core.frame_end > frames || core.frame_begin >= core.frame_end)
    throw std::invalid_argument("beamform_with_masks: core region out of range");

  const TfMask noise_mask = TfMask::Ones(frames, bins) - target_mask;
  Spectrogram out_spec;

  if (wped.num_channels() == 1) {
    // degenerate path: no spatial filtering, the mask does the work
    out_spec = mask_postfilter(wped, postfilter_mask ? *postfilter_mask : target_mask);
    if (debug) {
      debug->ref_channel = 0;
      debug->beamformed = wped;
    }
  } else {
    // coefficients use core frames only; the context stays in WPE/CACGMM
    const auto phi_s = scm_from_mask(wped, target_mask, core.frame_begin, core.frame_end);
    const auto phi_n = scm_from_mask(wped, noise_mask, core.frame_begin, core.frame_end);
    append_count_flag(result.flags, "scm_speech_fallback_bins", phi_s.fallback_bins.size());
    append_count_flag(result.flags, "scm_noise_fallback_bins", phi_n.fallback_bins.size());

    const int ref = select_reference_channel(phi_s, phi_n);
    const auto weights = mvdr_souden(phi_s, phi_n, ref);
    append_count_flag(result.flags, "mvdr_flagged_bins", weights.flagged_bins.size());
    Spectrogram beamformed = apply_beamformer(weights, wped);
    if (debug) {
      debug->ref_channel = ref;
      debug->beamformed = beamformed;
    }

    switch (cfg.variant) {
      case PipelineConfig::Variant::kGss:
        out_spec = std::move(beamformed);
        break;
      case PipelineConfig::Variant::kGssPostfilter:
        out_spec =
            mask_postfilter(beamformed, postfilter_mask ? *postfilter_mask : target_mask);
        break;
      case PipelineConfig::Variant::kCwmwfCban: {
        const auto steering = steering_from_beamformed(wped, beamformed, ref,
                                                       core.frame_begin, core.frame_end);
        append_count_flag(result.flags, "steering_fallback_bins",
                          steering.fallback_bins.size());
        const auto phi_n_stacked = scm_from_mask_stacked(wped, noise_mask, cfg.taps,
                                                         core.frame_begin, core.frame_end);
        std::vector<double> speech_psd(bins, 0.0);
        for (int f = 0; f < bins; ++f) {
          double acc = 0.0;
          for (int t = core.frame_begin; t < core.frame_end; ++t)
            acc += std::norm(beamformed.at(0, t, f));
          speech_psd[f] = acc / (core.frame_end - core.frame_begin);
        }
        const auto wiener = cwmwf(steering, phi_n_stacked, cfg.taps, speech_psd);
        append_count_flag(result.flags, "cwmwf_flagged_bins", wiener.flagged_bins.size());
        Spectrogram filtered = apply_beamformer(wiener, wped);
        const auto gain = ban_gain(wiener, phi_n_stacked);
        append_count_flag(result.flags, "cban_flagged_bins", gain.flagged_bins.size());
        out_spec = apply_bin_gain(filtered, gain.gain);
        break;
      }
    }
  }

  if (debug) {
    debug->final_spec = out_spec;
    debug->target_mask = target_mask;
  }

  auto synthesized = istft(out_spec, wped.config(), out_samples);
  Waveform core_audio;
  core_audio.sample_rate = synthesized.sample_rate();
  const auto& samples = synthesized.channels[0].samples;
  const long begin = std::min<long>(core.sample_begin, samples.size());
  const long end = std::min<long>(core.sample_end, samples.size());
  core_audio.samples.assign(samples.begin() + begin, samples.begin() + end);
  core_audio.samples.resize(core.sample_end - core.sample_begin, 0.0);
  result.audio = peak_normalize(core_audio);
  return result;
}

EnhanceResult enhance_segment(const MultichannelWaveform& audio, const ActivityGrid& activity,
                              const CoreRegion& core, const PipelineConfig& cfg,
                              SegmentDebug* debug) {
  cfg.validate();
  audio.validate();

  // channel selection on the raw context-padded audio
  std::vector<int> kept{0};
  if (audio.num_channels() > 1) {
    EvConfig ev = cfg.ev;
    const auto scores = envelope_variance_scores(audio, ev);
    kept = select_channels(scores, cfg.keep_fraction);
  }
  std::vector<Waveform> selected;
  selected.reserve(kept.size());
  for (int c : kept) selected.push_back(audio.channels[c]);
  MultichannelWaveform subset(std::move(selected));
  if (debug) debug->kept_channels = kept;

  auto spec = stft(subset, cfg.stft);
  if (spec.num_frames() != activity.num_frames)
    throw std::invalid_argument(
        "enhance_segment: activity grid frames do not match the STFT geometry");

  auto wped = wpe(spec, cfg.wpe);

  EnhanceResult result;
  TfMask target_mask;
  ActivityGrid pruned = activity.without_inactive_rows();
  if (pruned.num_speakers() < activity.num_speakers())
    result.flags.push_back(
        "dropped_inactive_speakers=" +
        std::to_string(activity.num_speakers() - pruned.num_speakers()));

  if (subset.num_channels() >= 2) {
    auto fit = fit_guided_cacgmm(wped, pruned, cfg.cacgmm);
    target_mask = class_mask(fit.masks, fit.masks.target_class);
  } else {
    target_mask = activity_mask(pruned, wped.num_bins());
  }

  auto filtered = beamform_with_masks(wped, target_mask, core, cfg,
                                      audio.num_samples(), debug);
  result.flags.insert(result.flags.end(), filtered.flags.begin(), filtered.flags.end());
  result.audio = std::move(filtered.audio);
  return result;
}

RunReport enhance_manifest(const SessionManifest& m, const PipelineConfig& cfg,
                           const std::string& out_dir, int workers) {
  cfg.validate();
  if (workers < 1) throw std::invalid_argument("enhance_manifest: workers must be >= 1");
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / m.session_id);

  RunReport report;
  report.segments.resize(m.segments.size());

  const int omp_threads =
      std::max(1, static_cast<int>(std::thread::hardware_concurrency()) / workers);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    if (workers > 1) omp_set_num_threads(omp_threads);
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= m.segments.size()) break;
      const auto& seg = m.segments[idx];
      SegmentReport& rep = report.segments[idx];
      rep.utt_id = seg.utt_id;
      rep.session_id = m.session_id;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        auto cut = cut_segment_with_context(m, seg.utt_id, cfg.context_secs, cfg.stft);
        auto enhanced = enhance_segment(cut.audio, cut.activity, cut.core, cfg);
        const std::string path =
            (fs::path(out_dir) / m.session_id / (seg.utt_id + ".wav")).string();
        write_wav(path, enhanced.audio, WavBitDepth::kFloat32);
        rep.status = "ok";
        rep.output_path = path;
        rep.flags = std::move(enhanced.flags);
      } catch (const std::exception& e) {
        rep.status = "failed";
        rep.error = seg.utt_id + ": " + e.what();
      }
      rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  write_run_report((fs::path(out_dir) / "report.jsonl").string(), report);
  return report;
}

void write_run_report(const std::string& path, const RunReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("enhance_manifest: cannot write report " + path);
  for (const auto& seg : report.segments) {
    nlohmann::json j{{"utt_id", seg.utt_id},
                     {"session", seg.session_id},
                     {"status", seg.status},
                     {"seconds", seg.seconds},
                     {"flags", seg.flags}};
    if (!seg.error.empty()) j["error"] = seg.error;
    if (!seg.output_path.empty()) j["output"] = seg.output_path;
    out << j.dump() << "\n";
  }
}

}  // namespace dsr
