// tests/test_channel_select.cc

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

#include "doctest.h"
#include "dsr/room_sim.h"
#include "dsr/stft.h"
#include "testutil.h"

using namespace dsr;

TEST_CASE("envelope variance: identical channels score identically") {
  Rng rng(1);
  auto w = dsr_test::speech_like(rng, 2.0, 16000);
  MultichannelWaveform mc({w, w, w});
  auto scores = envelope_variance_scores(mc);
  CHECK(scores[0] == doctest::Approx(scores[1]).epsilon(1e-12));
  CHECK(scores[1] == doctest::Approx(scores[2]).epsilon(1e-12));
}

TEST_CASE("envelope variance: per-channel gain does not change the score") {
  Rng rng(2);
  auto w = dsr_test::speech_like(rng, 2.0, 16000);
  Waveform half = w;
  for (auto& s : half.samples) s *= 0.5;
  auto a = envelope_variance_scores(MultichannelWaveform({w, w}));
  auto b = envelope_variance_scores(MultichannelWaveform({w, half}));
  CHECK(std::abs(a[1] - b[1]) < 1e-9);
}

TEST_CASE("envelope variance: scaling the whole signal leaves scores unchanged") {
  Rng rng(3);
  auto w1 = dsr_test::speech_like(rng, 2.0, 16000);
  auto w2 = dsr_test::speech_like(rng, 2.0, 16000);
  MultichannelWaveform mc({w1, w2});
  MultichannelWaveform scaled = mc;
  for (auto& c : scaled.channels)
    for (auto& s : c.samples) s *= 3.7;
  auto a = envelope_variance_scores(mc);
  auto b = envelope_variance_scores(scaled);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-9);
}

TEST_CASE("envelope variance: reverberated channel scores lower") {
  Rng rng(4);
  auto clean = dsr_test::speech_like(rng, 3.0, 16000);
  RoomSpec room;
  room.width = 5.0;
  room.length = 4.0;
  room.height = 3.0;
  room.beta = {0.9, 0.9, 0.9, 0.9, 0.9, 0.9};  // RT60 roughly 0.6 s
  room.source_pos = {1.0, 1.2, 1.5};
  room.mic_pos = {3.6, 2.8, 1.4};
  auto rir = simulate_rir(room, 16000, 12000);
  auto conv = fft_convolve(clean.samples, rir.samples);
  conv.resize(clean.num_samples());
  Waveform reverberant(std::move(conv), 16000);

  auto scores = envelope_variance_scores(MultichannelWaveform({clean, reverberant}));
  CHECK(scores[0] > scores[1]);
}

TEST_CASE("envelope variance: silent channel scores zero") {
  Rng rng(5);
  auto w = dsr_test::speech_like(rng, 2.0, 16000);
  Waveform silent;
  silent.sample_rate = 16000;
  silent.samples.assign(w.num_samples(), 0.0);
  auto scores = envelope_variance_scores(MultichannelWaveform({w, silent}));
  CHECK(scores[1] == 0.0);
  CHECK(std::isfinite(scores[0]));
  CHECK(scores[0] > 0.0);
}

TEST_CASE("envelope variance: permuting channels permutes scores") {
  Rng rng(6);
  auto a = dsr_test::speech_like(rng, 2.0, 16000);
  auto b = dsr_test::white_noise(rng, a.num_samples(), 16000, 0.2);
  auto c = dsr_test::sine(800.0, 2.0, 16000, 0.3);
  auto s1 = envelope_variance_scores(MultichannelWaveform({a, b, c}));
  auto s2 = envelope_variance_scores(MultichannelWaveform({c, a, b}));
  CHECK(s1[0] == doctest::Approx(s2[1]).epsilon(1e-12));
  CHECK(s1[1] == doctest::Approx(s2[2]).epsilon(1e-12));
  CHECK(s1[2] == doctest::Approx(s2[0]).epsilon(1e-12));
}

TEST_CASE("select_channels: keeps floor(fraction * I) with a minimum of one") {
  std::vector<double> ten(10);
  for (int i = 0; i < 10; ++i) ten[i] = i;
  CHECK(select_channels(ten, 0.8).size() == 8);
  CHECK(select_channels({3.0}, 0.8) == std::vector<int>{0});
  CHECK(select_channels({1.0, 2.0}, 0.1) == std::vector<int>{1});
}

TEST_CASE("select_channels: equal scores break ties toward lower indices") {
  std::vector<double> equal(4, 1.0);
  CHECK(select_channels(equal, 0.8) == std::vector<int>{0, 1, 2});
}

TEST_CASE("select_channels: output sorted by channel index") {
  std::vector<double> scores = {0.1, 0.9, 0.2, 0.8, 0.5};
  auto kept = select_channels(scores, 0.8);  // floor(4.0) = 4
  CHECK(kept == std::vector<int>{1, 2, 3, 4});
  CHECK(std::is_sorted(kept.begin(), kept.end()));
}
