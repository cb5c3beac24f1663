// include/dsr/pipeline.h

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

#ifndef DSR_PIPELINE_H_
#define DSR_PIPELINE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dsr/beamform.h"
#include "dsr/cacgmm.h"
#include "dsr/envelope_variance.h"
#include "dsr/manifest.h"
#include "dsr/stft.h"
#include "dsr/waveform.h"
#include "dsr/wpe.h"

namespace dsr {

// Full enhancement chain: channel selection, STFT, WPE, guided CACGMM
// masks, MVDR with core-restricted statistics, variant-specific filtering,
// synthesis, core trim, peak normalization.
struct PipelineConfig {
  enum class Variant { kGss, kGssPostfilter, kCwmwfCban };

  Variant variant = Variant::kGss;
  double context_secs = 15.0;
  double keep_fraction = 0.8;
  StftConfig stft;
  WpeConfig wpe;
  CacgmmConfig cacgmm;
  EvConfig ev;
  int taps = 5;  // convolutional filter length (cwmwf-cban only)
  std::uint64_t seed = 0;

  void validate() const;
  static Variant parse_variant(const std::string& name);
  static std::string variant_name(Variant v);
};

struct EnhanceResult {
  Waveform audio;
  std::vector<std::string> flags;
};

// Intermediate products, filled when a non-null pointer is passed.
struct SegmentDebug {
  std::vector<int> kept_channels;
  int ref_channel = -1;
  TfMask target_mask;
  Spectrogram beamformed;  // MVDR output before any variant filtering
  Spectrogram final_spec;  // what was synthesized
};

EnhanceResult enhance_segment(const MultichannelWaveform& audio, const ActivityGrid& activity,
                              const CoreRegion& core, const PipelineConfig& cfg,
                              SegmentDebug* debug = nullptr);

// The chain after mask estimation, exposed so wiring can be tested with
// substituted masks. postfilter_mask overrides the mask applied by the
// gss-postfilter variant (the covariance masks stay target_mask).
EnhanceResult beamform_with_masks(const Spectrogram& wped, const TfMask& target_mask,
                                  const CoreRegion& core, const PipelineConfig& cfg,
                                  std::size_t out_samples, SegmentDebug* debug = nullptr,
                                  const TfMask* postfilter_mask = nullptr);

struct SegmentReport {
  std::string utt_id;
  std::string session_id;
  std::string status;  // "ok" or "failed"
  std::string error;
  std::string output_path;
  double seconds = 0.0;
  std::vector<std::string> flags;
};

struct RunReport {
  std::vector<SegmentReport> segments;

  int num_failed() const {
    int n = 0;
    for (const auto& s : segments) n += s.status != "ok";
    return n;
  }
};

// Enhances every segment of the manifest into
// <out_dir>/<session_id>/<utt_id>.wav and writes <out_dir>/report.jsonl.
// Per-segment failures are recorded and the run continues.
RunReport enhance_manifest(const SessionManifest& m, const PipelineConfig& cfg,
                           const std::string& out_dir, int workers = 1);

void write_run_report(const std::string& path, const RunReport& report);

}  // namespace dsr

#endif  // DSR_PIPELINE_H_
