// include/dsr/resample.h

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

#ifndef DSR_RESAMPLE_H_
#define DSR_RESAMPLE_H_

#include "dsr/waveform.h"

namespace dsr {

// Band-limited sample-rate conversion (zero-phase windowed sinc).
// Output length is round(len * target / source); identity when the rates
// are equal already.
Waveform resample(const Waveform& w, int target_rate);
MultichannelWaveform resample(const MultichannelWaveform& w, int target_rate);

// Core rational resampler: output length round(len * num / den), sample
// rate label unchanged unless new_rate > 0. Used by resample() and by
// speed perturbation.
Waveform resample_ratio(const Waveform& w, long num, long den, int new_rate = 0);

// Irrational-step variant: out[n] = x(n * step), band-limited, out_len
// samples. The sample-rate label is kept.
Waveform resample_by_step(const Waveform& w, double step, std::size_t out_len);

}  // namespace dsr

#endif  // DSR_RESAMPLE_H_
