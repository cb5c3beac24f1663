// include/dsr/envelope_variance.h

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

#ifndef DSR_ENVELOPE_VARIANCE_H_
#define DSR_ENVELOPE_VARIANCE_H_

#include <vector>

#include "dsr/waveform.h"

namespace dsr {

// Envelope-variance channel ranking. Reverberation smears the sub-band
// energy envelopes, so channels with higher variance of the normalized
// log envelope are the cleaner ones.
struct EvConfig {
  int num_subbands = 40;       // mel-spaced
  int frame = 1024;            // 64 ms at 16 kHz
  int hop = 256;               // 16 ms
  double keep_fraction = 0.8;

  void validate() const;
};

// Per-channel quality scores; higher is better. A silent channel scores
// 0 rather than NaN. Scores are invariant to per-channel gain.
std::vector<double> envelope_variance_scores(const MultichannelWaveform& w,
                                             const EvConfig& cfg = EvConfig{});

// Keeps the top max(1, floor(keep_fraction * I)) channels by score, ties
// broken toward the lower index; the result is sorted by channel index.
std::vector<int> select_channels(const std::vector<double>& scores, double keep_fraction);

}  // namespace dsr

#endif  // DSR_ENVELOPE_VARIANCE_H_
