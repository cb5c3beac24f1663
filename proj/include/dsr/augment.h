// include/dsr/augment.h

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

#ifndef DSR_AUGMENT_H_
#define DSR_AUGMENT_H_

#include <cstdint>
#include <string>

#include "dsr/waveform.h"

namespace dsr {

struct MixConfig {
  double snr_low_db = 5.0;
  double snr_high_db = 12.0;
  double pad_secs = 4.0;
  double codec_prob = 1.0 / 7.0;
  std::uint64_t seed = 0;
  std::string codec_cmd;  // external codec hook, WAV on stdin/stdout

  void validate() const;
};

struct MixResult {
  Waveform mixture;
  Waveform reverberated_primary;     // primary * rir_p (unscaled)
  Waveform reverberated_background;  // looped background * rir_b, SNR-scaled
  double snr_db = 0.0;               // the drawn target
  std::size_t offset = 0;            // start offset into the padded background
};

// Inserts a background speaker: pads the background with silence on both
// sides, starts it at a random offset (looping if exhausted), reverberates
// both signals, scales the background so the post-reverberation SNR hits a
// uniform draw from [snr_low_db, snr_high_db], and sums. Output length is
// the primary's length. Rejects inputs with zero power.
MixResult mix_background_speaker(const Waveform& primary, const Waveform& background,
                                 const Waveform& rir_primary, const Waveform& rir_background,
                                 const MixConfig& cfg);

// Resample-based tempo/pitch change; output length round(len / factor).
// The training recipe draws factors from {0.9, 1.0, 1.1}.
Waveform speed_perturb(const Waveform& w, double factor);

enum class Codec { kG711Ulaw, kG711Alaw, kExternal };

struct CodecResult {
  Waveform audio;
  bool applied = false;
  std::string warning;
};

// Applies the codec with probability cfg.codec_prob (seeded). The G.711
// paths run at 8 kHz with resampling around the companding; kExternal
// pipes WAV through cfg.codec_cmd and falls back to the input on failure.
CodecResult apply_codec(const Waveform& w, Codec codec, const MixConfig& cfg);

}  // namespace dsr

#endif  // DSR_AUGMENT_H_
