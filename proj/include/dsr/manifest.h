// include/dsr/manifest.h

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

#ifndef DSR_MANIFEST_H_
#define DSR_MANIFEST_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dsr/stft.h"
#include "dsr/waveform.h"

namespace dsr {

struct SegmentAnnotation {
  std::string utt_id;
  std::string speaker_id;
  double start = 0.0;  // seconds
  double end = 0.0;
  std::string group_key;  // e.g. "chime6/mdm"

  double duration() const { return end - start; }
};

// One far-field session: one audio file per microphone channel plus the
// oracle diarization segments.
struct SessionManifest {
  std::string session_id;
  std::vector<std::string> channel_paths;
  std::vector<SegmentAnnotation> segments;

  // probed from the audio at load time
  int sample_rate = 0;
  std::uint64_t num_frames = 0;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(num_frames) / sample_rate : 0.0;
  }
};

// Per-speaker binary activity rasterized to STFT frames. A frame counts
// as active when at least half of its hop cell is covered by a segment.
struct ActivityGrid {
  std::vector<std::string> speakers;
  int num_frames = 0;
  int target_row = -1;
  StftConfig stft;
  std::vector<std::uint8_t> activity;  // [speaker][frame]

  bool active(int row, int frame) const {
    return activity[static_cast<std::size_t>(row) * num_frames + frame] != 0;
  }
  void set_active(int row, int frame, bool v) {
    activity[static_cast<std::size_t>(row) * num_frames + frame] = v ? 1 : 0;
  }
  int num_speakers() const { return static_cast<int>(speakers.size()); }

  // Removes speakers with no active frame (the target row is kept).
  ActivityGrid without_inactive_rows() const;
};

// Frame/sample range of the annotated utterance inside the padded cut.
struct CoreRegion {
  long sample_begin = 0;
  long sample_end = 0;  // exclusive
  int frame_begin = 0;
  int frame_end = 0;  // exclusive
};

struct CutSegment {
  MultichannelWaveform audio;  // at kInternalSampleRate
  ActivityGrid activity;
  CoreRegion core;
};

// Parses and validates the session JSON
// { "session_id": str, "channels": [path...],
//   "segments": [{"utt_id","speaker","start","end","group"}] }.
// Schema violations carry field-level messages; audio files are probed.
SessionManifest load_session_manifest(const std::string& path);

// Extracts [start - context, end + context], clamped to the recording,
// resampled to 16 kHz if needed, together with the activity of every
// speaker intersecting the padded window.
CutSegment cut_segment_with_context(const SessionManifest& m, const std::string& utt_id,
                                    double context_secs,
                                    const StftConfig& cfg = StftConfig{});

// Per group: shuffle with the seed and keep entries until the running
// duration first reaches the target. Groups with less material than the
// target are returned whole. Output preserves input order.
std::vector<SegmentAnnotation> subset_by_hours(const std::vector<SegmentAnnotation>& entries,
                                               double target_hours, std::uint64_t seed);

}  // namespace dsr

#endif  // DSR_MANIFEST_H_
