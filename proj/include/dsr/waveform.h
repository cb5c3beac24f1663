// include/dsr/waveform.h

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

#ifndef DSR_WAVEFORM_H_
#define DSR_WAVEFORM_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dsr {

// All enhancement math runs at this rate; files at other rates are
// resampled on ingest.
constexpr int kInternalSampleRate = 16000;

// Mono time-domain signal. Samples are dimensionless amplitudes with a
// nominal range of [-1, 1]; anything finite is legal.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kInternalSampleRate;

  Waveform() = default;
  Waveform(std::vector<double> s, int rate) : samples(std::move(s)), sample_rate(rate) {
    if (sample_rate <= 0) throw std::invalid_argument("Waveform: sample_rate must be > 0");
  }

  std::size_t num_samples() const { return samples.size(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// One Waveform per microphone; equal length and rate across channels.
struct MultichannelWaveform {
  std::vector<Waveform> channels;

  MultichannelWaveform() = default;
  explicit MultichannelWaveform(std::vector<Waveform> ch) : channels(std::move(ch)) {
    validate();
  }

  void validate() const {
    if (channels.empty())
      throw std::invalid_argument("MultichannelWaveform: need at least one channel");
    for (const auto& c : channels) {
      if (c.sample_rate != channels[0].sample_rate ||
          c.num_samples() != channels[0].num_samples())
        throw std::invalid_argument(
            "MultichannelWaveform: channels must share length and sample rate");
    }
  }

  std::size_t num_channels() const { return channels.size(); }
  std::size_t num_samples() const { return channels.empty() ? 0 : channels[0].num_samples(); }
  int sample_rate() const { return channels.empty() ? 0 : channels[0].sample_rate; }
};

inline bool all_finite(const Waveform& w) {
  for (double s : w.samples)
    if (!std::isfinite(s)) return false;
  return true;
}

}  // namespace dsr

#endif  // DSR_WAVEFORM_H_
