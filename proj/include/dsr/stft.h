// include/dsr/stft.h

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

#ifndef DSR_STFT_H_
#define DSR_STFT_H_

#include <complex>
#include <string>
#include <vector>

#include "dsr/waveform.h"

namespace dsr {

// Analysis/synthesis parameters. The defaults match the enhancement
// chain: 1024-sample periodic Hann, hop 256, FFT 1024 at 16 kHz.
struct StftConfig {
  int window_length = 1024;
  int hop = 256;
  std::string window = "hann";
  int fft_size = 1024;

  void validate() const;
  int num_bins() const { return fft_size / 2 + 1; }
  bool operator==(const StftConfig& o) const = default;
};

// Frames are centered at sample t*hop of the original signal; the signal
// is reflect-padded by half a window on each side, so
// frames = 1 + floor((len + 2*(window/2) - window) / hop).
int stft_num_frames(std::size_t num_samples, const StftConfig& cfg);

// Named taper; periodic (DFT-even) variants so that overlapped squares add
// to a constant for the hann/hop=len/4 pair.
std::vector<double> make_window(const std::string& name, int length);

// Complex half-spectrum tensor indexed (channel, frame, bin).
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(int channels, int frames, int bins, StftConfig cfg, int sample_rate)
      : channels_(channels), frames_(frames), bins_(bins), cfg_(std::move(cfg)),
        sample_rate_(sample_rate),
        data_(static_cast<std::size_t>(channels) * frames * bins) {}

  std::complex<double>& at(int c, int t, int k) {
    return data_[(static_cast<std::size_t>(c) * frames_ + t) * bins_ + k];
  }
  const std::complex<double>& at(int c, int t, int k) const {
    return data_[(static_cast<std::size_t>(c) * frames_ + t) * bins_ + k];
  }

  int num_channels() const { return channels_; }
  int num_frames() const { return frames_; }
  int num_bins() const { return bins_; }
  int sample_rate() const { return sample_rate_; }
  const StftConfig& config() const { return cfg_; }

  std::vector<std::complex<double>>& data() { return data_; }
  const std::vector<std::complex<double>>& data() const { return data_; }

 private:
  int channels_ = 0, frames_ = 0, bins_ = 0;
  StftConfig cfg_;
  int sample_rate_ = 0;
  std::vector<std::complex<double>> data_;
};

// Per-channel analysis; channels run in parallel.
Spectrogram stft(const MultichannelWaveform& w, const StftConfig& cfg);
Spectrogram stft(const Waveform& w, const StftConfig& cfg);

// Weighted overlap-add synthesis with COLA normalization, trimmed or
// zero-padded to out_length samples. cfg must equal the analysis config.
MultichannelWaveform istft(const Spectrogram& s, const StftConfig& cfg,
                           std::size_t out_length);

// Full linear convolution (length a + b - 1) via the FFT.
std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b);

namespace serial {
// Reference implementation: identical math, plain loops, no OpenMP.
Spectrogram stft(const MultichannelWaveform& w, const StftConfig& cfg);
MultichannelWaveform istft(const Spectrogram& s, const StftConfig& cfg,
                           std::size_t out_length);
}  // namespace serial

}  // namespace dsr

#endif  // DSR_STFT_H_
