// include/dsr/wpe.h

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

#ifndef DSR_WPE_H_
#define DSR_WPE_H_

#include "dsr/stft.h"

namespace dsr {

// Iterative multichannel weighted-prediction-error dereverberation.
// Per frequency bin, a linear predictor over taps [delay, delay+taps)
// estimates the late reverberation from the channel history, weighted by
// the current power estimate; the prediction is subtracted.
struct WpeConfig {
  int taps = 10;        // K
  int delay = 2;        // frames before the prediction window starts
  int iterations = 3;
  double psd_floor = 1e-10;

  void validate() const;
};

// Requires frames > taps + delay. Frequency bins run in parallel.
Spectrogram wpe(const Spectrogram& s, const WpeConfig& cfg = WpeConfig{});

namespace serial {
// Reference implementation: per-frame outer-product accumulation, one bin
// after another. Kept for testing the parallel kernel against.
Spectrogram wpe(const Spectrogram& s, const WpeConfig& cfg = WpeConfig{});
}  // namespace serial

}  // namespace dsr

#endif  // DSR_WPE_H_
