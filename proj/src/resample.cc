// src/resample.cc

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

#include "dsr/resample.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dsr {

namespace {

constexpr int kHalfWidth = 32;      // kernel half-width in input samples
constexpr double kRolloff = 0.945;  // transition-band allowance

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = 3.14159265358979323846 * x;
  return std::sin(px) / px;
}

// Blackman-windowed sinc, cutoff fc cycles/sample, support |u| <= half.
double kernel(double u, double fc, int half) {
  if (std::abs(u) > half) return 0.0;
  const double two_pi = 2.0 * 3.14159265358979323846;
  const double t = (u + half) / (2.0 * half);  // [0,1]
  const double win = 0.42 - 0.5 * std::cos(two_pi * t) + 0.08 * std::cos(2.0 * two_pi * t);
  return 2.0 * fc * sinc(2.0 * fc * u) * win;
}

}  // namespace

Waveform resample_ratio(const Waveform& w, long num, long den, int new_rate) {
  if (num <= 0 || den <= 0) throw std::invalid_argument("resample: ratio must be positive");
  const long g = std::gcd(num, den);
  num /= g;
  den /= g;
  const int rate = new_rate > 0 ? new_rate : w.sample_rate;
  if (num == den) {
    Waveform out = w;
    out.sample_rate = rate;
    return out;
  }
  const long n_in = static_cast<long>(w.num_samples());
  const long n_out = std::lround(static_cast<double>(n_in) * num / den);
  Waveform out;
  out.sample_rate = rate;
  out.samples.resize(n_out);

  // When decimating, the cutoff shrinks and the kernel stretches to keep
  // the same number of sidelobes below the new Nyquist.
  const double ratio = static_cast<double>(num) / den;
  const double fc = 0.5 * kRolloff * std::min(1.0, ratio);
  const int half = ratio >= 1.0 ? kHalfWidth
                                : static_cast<int>(std::ceil(kHalfWidth / ratio));
  for (long n = 0; n < n_out; ++n) {
    // exact input-domain position of output sample n
    const double t = static_cast<double>(n) * den / num;
    const long lo = static_cast<long>(std::ceil(t - half));
    const long hi = static_cast<long>(std::floor(t + half));
    double acc = 0.0, wacc = 0.0;
    for (long m = lo; m <= hi; ++m) {
      const double k = kernel(t - m, fc, half);
      wacc += k;
      if (m >= 0 && m < n_in) acc += k * w.samples[static_cast<std::size_t>(m)];
    }
    // normalizing by the kernel sum pins the passband gain at exactly 1
    out.samples[static_cast<std::size_t>(n)] = wacc > 0.0 ? acc / wacc : 0.0;
  }
  return out;
}

Waveform resample_by_step(const Waveform& w, double step, std::size_t out_len) {
  if (step <= 0.0) throw std::invalid_argument("resample: step must be positive");
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.resize(out_len);
  const long n_in = static_cast<long>(w.num_samples());
  const double fc = 0.5 * kRolloff * std::min(1.0, 1.0 / step);
  const int half = step <= 1.0 ? kHalfWidth
                               : static_cast<int>(std::ceil(kHalfWidth * step));
  for (std::size_t n = 0; n < out_len; ++n) {
    const double t = static_cast<double>(n) * step;
    const long lo = static_cast<long>(std::ceil(t - half));
    const long hi = static_cast<long>(std::floor(t + half));
    double acc = 0.0, wacc = 0.0;
    for (long m = lo; m <= hi; ++m) {
      const double k = kernel(t - m, fc, half);
      wacc += k;
      if (m >= 0 && m < n_in) acc += k * w.samples[static_cast<std::size_t>(m)];
    }
    out.samples[n] = wacc > 0.0 ? acc / wacc : 0.0;
  }
  return out;
}

Waveform resample(const Waveform& w, int target_rate) {
  if (target_rate <= 0) throw std::invalid_argument("resample: target_rate must be > 0");
  if (target_rate == w.sample_rate) return w;
  return resample_ratio(w, target_rate, w.sample_rate, target_rate);
}

MultichannelWaveform resample(const MultichannelWaveform& w, int target_rate) {
  std::vector<Waveform> out;
  out.reserve(w.num_channels());
  for (const auto& c : w.channels) out.push_back(resample(c, target_rate));
  return MultichannelWaveform(std::move(out));
}

}  // namespace dsr
