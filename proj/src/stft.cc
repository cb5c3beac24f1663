// src/stft.cc

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

#include "dsr/stft.h"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "stft_impl.h"

namespace dsr {

namespace internal {

RealFft::RealFft(int n) : n_(n) {
  std::vector<double> re(n);
  std::vector<std::complex<double>> cx(n / 2 + 1);
  fwd_ = fftw_plan_dft_r2c_1d(n, re.data(), reinterpret_cast<fftw_complex*>(cx.data()),
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  inv_ = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(cx.data()), re.data(),
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!fwd_ || !inv_) throw std::runtime_error("stft: FFTW plan creation failed");
}

RealFft::~RealFft() {
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void RealFft::forward(double* in, std::complex<double>* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), in,
                       reinterpret_cast<fftw_complex*>(out));
}

void RealFft::inverse(std::complex<double>* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_),
                       reinterpret_cast<fftw_complex*>(in), out);
  const double scale = 1.0 / n_;
  for (int i = 0; i < n_; ++i) out[i] *= scale;
}

const RealFft& fft_for(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<RealFft>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<RealFft>(n)).first;
  return *it->second;
}

std::vector<double> reflect_pad(const std::vector<double>& x, int half_window) {
  const long n = static_cast<long>(x.size());
  std::vector<double> padded(x.size() + 2 * half_window);
  for (long i = 0; i < static_cast<long>(padded.size()); ++i) {
    long j = i - half_window;
    if (j < 0) j = -j;
    if (j >= n) j = 2 * n - 2 - j;
    padded[i] = x[static_cast<std::size_t>(j)];
  }
  return padded;
}

void analyze_channel(const std::vector<double>& samples, const StftConfig& cfg,
                     const std::vector<double>& window, Spectrogram& out, int channel) {
  const int frames = out.num_frames();
  const int bins = out.num_bins();
  const RealFft& fft = fft_for(cfg.fft_size);
  std::vector<double> padded = reflect_pad(samples, cfg.window_length / 2);
  std::vector<double> frame(cfg.fft_size);
  std::vector<std::complex<double>> spec(bins);
  for (int m = 0; m < frames; ++m) {
    const double* src = padded.data() + static_cast<std::size_t>(m) * cfg.hop;
    for (int i = 0; i < cfg.window_length; ++i) frame[i] = src[i] * window[i];
    std::fill(frame.begin() + cfg.window_length, frame.end(), 0.0);
    fft.forward(frame.data(), spec.data());
    for (int k = 0; k < bins; ++k) out.at(channel, m, k) = spec[k];
  }
}

std::vector<double> window_square_overlap(const StftConfig& cfg,
                                          const std::vector<double>& window,
                                          int frames) {
  std::vector<double> wsum(static_cast<std::size_t>(frames - 1) * cfg.hop +
                           cfg.window_length);
  for (int m = 0; m < frames; ++m)
    for (int i = 0; i < cfg.window_length; ++i)
      wsum[static_cast<std::size_t>(m) * cfg.hop + i] += window[i] * window[i];
  return wsum;
}

std::vector<double> synthesize_channel(const Spectrogram& s, int channel,
                                       const StftConfig& cfg,
                                       const std::vector<double>& window,
                                       const std::vector<double>& window_square_sum,
                                       std::size_t out_length) {
  const int frames = s.num_frames();
  const int bins = s.num_bins();
  const int half = cfg.window_length / 2;
  const RealFft& fft = fft_for(cfg.fft_size);
  std::vector<double> acc(window_square_sum.size());
  std::vector<double> time(cfg.fft_size);
  std::vector<std::complex<double>> spec(bins);
  for (int m = 0; m < frames; ++m) {
    for (int k = 0; k < bins; ++k) spec[k] = s.at(channel, m, k);
    fft.inverse(spec.data(), time.data());
    for (int i = 0; i < cfg.window_length; ++i)
      acc[static_cast<std::size_t>(m) * cfg.hop + i] += time[i] * window[i];
  }
  std::vector<double> out(out_length, 0.0);
  const std::size_t n = std::min(out_length, acc.size() > static_cast<std::size_t>(half)
                                                 ? acc.size() - half
                                                 : 0);
  for (std::size_t i = 0; i < n; ++i) {
    double d = window_square_sum[i + half];
    out[i] = d > 1e-12 ? acc[i + half] / d : 0.0;
  }
  return out;
}

}  // namespace internal

void StftConfig::validate() const {
  if (hop <= 0 || window_length < hop || fft_size < window_length)
    throw std::invalid_argument("StftConfig: require 0 < hop <= window_length <= fft_size");
  make_window(window, window_length);  // rejects unknown names
}

int stft_num_frames(std::size_t num_samples, const StftConfig& cfg) {
  const long pad = 2 * (cfg.window_length / 2);
  const long usable = static_cast<long>(num_samples) + pad - cfg.window_length;
  if (usable < 0) return 0;
  return 1 + static_cast<int>(usable / cfg.hop);
}

std::vector<double> make_window(const std::string& name, int length) {
  std::vector<double> w(length);
  const double two_pi = 2.0 * 3.14159265358979323846;
  if (name == "hann") {
    for (int i = 0; i < length; ++i) w[i] = 0.5 - 0.5 * std::cos(two_pi * i / length);
  } else if (name == "sqrt_hann") {
    for (int i = 0; i < length; ++i)
      w[i] = std::sqrt(0.5 - 0.5 * std::cos(two_pi * i / length));
  } else if (name == "hamming") {
    for (int i = 0; i < length; ++i) w[i] = 0.54 - 0.46 * std::cos(two_pi * i / length);
  } else if (name == "rect") {
    std::fill(w.begin(), w.end(), 1.0);
  } else {
    throw std::invalid_argument("unknown window: " + name);
  }
  return w;
}

static Spectrogram stft_impl(const MultichannelWaveform& w, const StftConfig& cfg,
                             bool parallel) {
  cfg.validate();
  if (w.num_samples() < static_cast<std::size_t>(cfg.window_length))
    throw std::invalid_argument("stft: signal shorter than one window");
  const int channels = static_cast<int>(w.num_channels());
  const int frames = stft_num_frames(w.num_samples(), cfg);
  Spectrogram out(channels, frames, cfg.num_bins(), cfg, w.sample_rate());
  const std::vector<double> window = make_window(cfg.window, cfg.window_length);
  internal::fft_for(cfg.fft_size);  // plan before entering the parallel region
#pragma omp parallel for schedule(static) if (parallel)
  for (int c = 0; c < channels; ++c)
    internal::analyze_channel(w.channels[c].samples, cfg, window, out, c);
  return out;
}

static MultichannelWaveform istft_impl(const Spectrogram& s, const StftConfig& cfg,
                                       std::size_t out_length, bool parallel) {
  cfg.validate();
  if (!(s.config() == cfg))
    throw std::invalid_argument("istft: config does not match analysis config");
  if (s.num_frames() < 1) throw std::invalid_argument("istft: empty spectrogram");
  const int channels = s.num_channels();
  const std::vector<double> window = make_window(cfg.window, cfg.window_length);
  const std::vector<double> wsum =
      internal::window_square_overlap(cfg, window, s.num_frames());
  internal::fft_for(cfg.fft_size);
  std::vector<Waveform> out(channels);
#pragma omp parallel for schedule(static) if (parallel)
  for (int c = 0; c < channels; ++c) {
    out[c].sample_rate = s.sample_rate();
    out[c].samples = internal::synthesize_channel(s, c, cfg, window, wsum, out_length);
  }
  return MultichannelWaveform(std::move(out));
}

Spectrogram stft(const MultichannelWaveform& w, const StftConfig& cfg) {
  return stft_impl(w, cfg, true);
}

Spectrogram stft(const Waveform& w, const StftConfig& cfg) {
  return stft_impl(MultichannelWaveform({w}), cfg, true);
}

MultichannelWaveform istft(const Spectrogram& s, const StftConfig& cfg,
                           std::size_t out_length) {
  return istft_impl(s, cfg, out_length, true);
}

std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < out_len) n <<= 1;
  const internal::RealFft& fft = internal::fft_for(static_cast<int>(n));
  std::vector<double> ta(n, 0.0), tb(n, 0.0);
  std::copy(a.begin(), a.end(), ta.begin());
  std::copy(b.begin(), b.end(), tb.begin());
  std::vector<std::complex<double>> fa(n / 2 + 1), fb(n / 2 + 1);
  fft.forward(ta.data(), fa.data());
  fft.forward(tb.data(), fb.data());
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  std::vector<double> out(n);
  fft.inverse(fa.data(), out.data());
  out.resize(out_len);
  return out;
}

namespace serial {

Spectrogram stft(const MultichannelWaveform& w, const StftConfig& cfg) {
  return stft_impl(w, cfg, false);
}

MultichannelWaveform istft(const Spectrogram& s, const StftConfig& cfg,
                           std::size_t out_length) {
  return istft_impl(s, cfg, out_length, false);
}

}  // namespace serial

}  // namespace dsr
