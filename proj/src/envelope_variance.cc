// src/envelope_variance.cc

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

#include "dsr/envelope_variance.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dsr/stft.h"

namespace dsr {

namespace {

constexpr double kLogFloor = 1e-10;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular mel filters over the half spectrum, rows summing the power
// spectrum into sub-band energies.
std::vector<std::vector<double>> mel_filterbank(int num_bands, int fft_size, int rate) {
  const int bins = fft_size / 2 + 1;
  const double mel_max = hz_to_mel(rate / 2.0);
  std::vector<double> centers(num_bands + 2);
  for (int b = 0; b < num_bands + 2; ++b)
    centers[b] = mel_to_hz(mel_max * b / (num_bands + 1));
  std::vector<std::vector<double>> fb(num_bands, std::vector<double>(bins, 0.0));
  for (int b = 0; b < num_bands; ++b) {
    const double lo = centers[b], mid = centers[b + 1], hi = centers[b + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * rate / fft_size;
      if (f <= lo || f >= hi) continue;
      fb[b][k] = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
    }
  }
  return fb;
}

}  // namespace

void EvConfig::validate() const {
  if (num_subbands < 1) throw std::invalid_argument("EvConfig: num_subbands must be >= 1");
  if (frame <= 0 || hop <= 0 || hop > frame)
    throw std::invalid_argument("EvConfig: require 0 < hop <= frame");
  if (keep_fraction <= 0.0 || keep_fraction > 1.0)
    throw std::invalid_argument("EvConfig: keep_fraction must be in (0, 1]");
}

std::vector<double> envelope_variance_scores(const MultichannelWaveform& w,
                                             const EvConfig& cfg) {
  cfg.validate();
  w.validate();
  if (w.num_samples() < static_cast<std::size_t>(cfg.frame))
    throw std::invalid_argument("envelope_variance_scores: signal shorter than one frame");

  const int channels = static_cast<int>(w.num_channels());
  StftConfig scfg;
  scfg.window_length = cfg.frame;
  scfg.hop = cfg.hop;
  scfg.fft_size = cfg.frame;
  scfg.window = "hann";
  const auto fb = mel_filterbank(cfg.num_subbands, scfg.fft_size, w.sample_rate());

  // V[channel][band] = variance over frames of the normalized log envelope
  std::vector<std::vector<double>> variance(channels,
                                            std::vector<double>(cfg.num_subbands, 0.0));
#pragma omp parallel for schedule(static)
  for (int c = 0; c < channels; ++c) {
    auto spec = serial::stft(MultichannelWaveform({w.channels[c]}), scfg);
    const int frames = spec.num_frames();
    std::vector<double> env(frames);
    for (int b = 0; b < cfg.num_subbands; ++b) {
      double mean = 0.0;
      for (int t = 0; t < frames; ++t) {
        double e = 0.0;
        for (int k = 0; k < spec.num_bins(); ++k)
          if (fb[b][k] != 0.0) e += fb[b][k] * std::norm(spec.at(0, t, k));
        env[t] = e;
        mean += e;
      }
      mean /= frames;
      if (mean <= 0.0) continue;  // silent band, variance stays exactly 0
      double sum = 0.0, sum2 = 0.0;
      for (int t = 0; t < frames; ++t) {
        const double lg = std::log(std::max(env[t] / mean, kLogFloor));
        sum += lg;
        sum2 += lg * lg;
      }
      sum /= frames;
      variance[c][b] = std::max(0.0, sum2 / frames - sum * sum);
    }
  }

  std::vector<double> scores(channels, 0.0);
  for (int b = 0; b < cfg.num_subbands; ++b) {
    double vmax = 0.0;
    for (int c = 0; c < channels; ++c) vmax = std::max(vmax, variance[c][b]);
    if (vmax <= 0.0) continue;  // no channel modulates in this band
    for (int c = 0; c < channels; ++c) scores[c] += variance[c][b] / vmax;
  }
  return scores;
}

std::vector<int> select_channels(const std::vector<double>& scores, double keep_fraction) {
  if (scores.empty()) throw std::invalid_argument("select_channels: no scores");
  if (keep_fraction <= 0.0 || keep_fraction > 1.0)
    throw std::invalid_argument("select_channels: keep_fraction must be in (0, 1]");
  const int total = static_cast<int>(scores.size());
  const int keep = std::max(1, static_cast<int>(std::floor(keep_fraction * total)));
  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  order.resize(keep);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace dsr
