// src/stft_impl.h

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

#ifndef DSR_SRC_STFT_IMPL_H_
#define DSR_SRC_STFT_IMPL_H_

#include <complex>
#include <vector>

#include "dsr/stft.h"

namespace dsr {
namespace internal {

// Cached FFTW real transform of one size. Plan creation is serialized
// internally; execution with caller-owned buffers is thread-safe.
// Both directions may clobber the input buffer.
class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  void forward(double* in, std::complex<double>* out) const;
  // Inverse includes the 1/n scale.
  void inverse(std::complex<double>* in, double* out) const;
  int size() const { return n_; }

 private:
  int n_;
  void* fwd_;
  void* inv_;
};

const RealFft& fft_for(int n);

// Reflect-pads by window/2 on each side.
std::vector<double> reflect_pad(const std::vector<double>& x, int half_window);

// One channel in/out of the TF domain; shared by the parallel and serial
// front ends.
void analyze_channel(const std::vector<double>& samples, const StftConfig& cfg,
                     const std::vector<double>& window, Spectrogram& out, int channel);
std::vector<double> synthesize_channel(const Spectrogram& s, int channel,
                                       const StftConfig& cfg,
                                       const std::vector<double>& window,
                                       const std::vector<double>& window_square_sum,
                                       std::size_t out_length);
std::vector<double> window_square_overlap(const StftConfig& cfg,
                                          const std::vector<double>& window,
                                          int frames);

}  // namespace internal
}  // namespace dsr

#endif  // DSR_SRC_STFT_IMPL_H_
