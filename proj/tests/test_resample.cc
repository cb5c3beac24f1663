// tests/test_resample.cc

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

#include "doctest.h"
#include "dsr/stft.h"
#include "testutil.h"

using namespace dsr;

namespace {

// dominant frequency via zero-padded DFT peak
double spectral_peak_hz(const Waveform& w) {
  StftConfig cfg;
  cfg.window_length = std::min<int>(2048, static_cast<int>(w.num_samples()));
  cfg.window_length &= ~1;
  cfg.hop = cfg.window_length / 4;
  cfg.fft_size = 8192;
  auto s = stft(w, cfg);
  int t = s.num_frames() / 2;
  int best = 0;
  double best_mag = 0.0;
  for (int k = 0; k < s.num_bins(); ++k) {
    double m = std::abs(s.at(0, t, k));
    if (m > best_mag) {
      best_mag = m;
      best = k;
    }
  }
  return best * static_cast<double>(w.sample_rate) / cfg.fft_size;
}

}  // namespace

TEST_CASE("resample: equal rates is the identity") {
  auto w = dsr_test::sine(440.0, 0.3, 16000);
  auto r = resample(w, 16000);
  REQUIRE(r.num_samples() == w.num_samples());
  for (std::size_t i = 0; i < w.num_samples(); ++i) CHECK(r.samples[i] == w.samples[i]);
}

TEST_CASE("resample: 16000 samples at 16 kHz -> 8000 samples at 8 kHz") {
  Waveform w(std::vector<double>(16000, 0.25), 16000);
  auto r = resample(w, 8000);
  CHECK(r.num_samples() == 8000);
  CHECK(r.sample_rate == 8000);
}

TEST_CASE("resample: 1 kHz sine 16->8 kHz keeps peak, amplitude within 1%") {
  auto w = dsr_test::sine(1000.0, 1.0, 16000, 0.5);
  auto r = resample(w, 8000);
  CHECK(spectral_peak_hz(r) == doctest::Approx(1000.0).epsilon(0.01));
  // peak amplitude away from the edges
  double peak = 0.0;
  for (std::size_t i = 500; i + 500 < r.num_samples(); ++i)
    peak = std::max(peak, std::abs(r.samples[i]));
  CHECK(peak == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("resample: upsampling interpolates, then downsampling restores") {
  auto w = dsr_test::sine(700.0, 0.5, 16000, 0.4);
  auto up = resample(w, 48000);
  CHECK(up.num_samples() == w.num_samples() * 3);
  auto back = resample(up, 16000);
  REQUIRE(back.num_samples() == w.num_samples());
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 600; i + 600 < w.num_samples(); ++i) {
    err += (back.samples[i] - w.samples[i]) * (back.samples[i] - w.samples[i]);
    ref += w.samples[i] * w.samples[i];
  }
  CHECK(std::sqrt(err / ref) < 1e-3);
}

TEST_CASE("resample_ratio: invalid ratios rejected") {
  Waveform w(std::vector<double>(100, 0.0), 16000);
  CHECK_THROWS_AS(resample_ratio(w, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(resample_ratio(w, 1, -2), std::invalid_argument);
  CHECK_THROWS_AS(resample(w, 0), std::invalid_argument);
}
