// tests/test_room_sim.cc

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

#include "dsr/room_sim.h"

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "testutil.h"

using namespace dsr;

TEST_CASE("sample_room: dimensions and reflections stay in range") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto r = sample_room(seed);
    CHECK(r.width >= 1.5);
    CHECK(r.width <= 5.5);
    CHECK(r.height >= 2.0);
    CHECK(r.height <= 9.5);
    CHECK(r.length >= 2.5);
    CHECK(r.length <= 16.5);
    for (double b : r.beta) {
      CHECK(b >= 0.45);
      CHECK(b <= 0.95);
    }
    CHECK_NOTHROW(r.validate());
  }
}

TEST_CASE("sample_room: same seed gives the same room") {
  auto a = sample_room(std::uint64_t{77});
  auto b = sample_room(std::uint64_t{77});
  CHECK(a.width == b.width);
  CHECK(a.length == b.length);
  CHECK(a.beta == b.beta);
  CHECK(a.source_pos == b.source_pos);
  CHECK(a.mic_pos == b.mic_pos);
}

TEST_CASE("sample_room: width mean over 1000 draws near 3.5") {
  Rng rng(2024);
  double acc = 0.0;
  for (int i = 0; i < 1000; ++i) acc += sample_room(rng).width;
  CHECK(acc / 1000.0 == doctest::Approx(3.5).epsilon(0.1 / 3.5));
}

TEST_CASE("simulate_rir: beta 0 leaves only the direct path") {
  RoomSpec r;
  r.width = 5.0;
  r.length = 6.0;
  r.height = 3.0;
  r.beta = {0, 0, 0, 0, 0, 0};
  r.source_pos = {1.0, 2.0, 1.5};
  r.mic_pos = {2.0, 3.4, 1.5};
  auto rir = simulate_rir(r, 16000, 2000);
  const double dist = std::hypot(1.0, 1.4, 0.0);
  const int expect = static_cast<int>(std::lround(dist / 343.0 * 16000));
  int peak = static_cast<int>(std::max_element(rir.samples.begin(), rir.samples.end(),
                                               [](double a, double b) {
                                                 return std::abs(a) < std::abs(b);
                                               }) -
                              rir.samples.begin());
  CHECK(std::abs(peak - expect) <= 1);
  // all energy confined to the fractional-delay kernel around the peak
  double inside = 0.0, total = 0.0;
  for (int i = 0; i < 2000; ++i) {
    total += rir.samples[i] * rir.samples[i];
    if (std::abs(i - peak) <= 41) inside += rir.samples[i] * rir.samples[i];
  }
  CHECK(total - inside <= 1e-6 * total);
}

TEST_CASE("simulate_rir: 1.715 m at c=343 puts the direct peak at sample 80") {
  RoomSpec r;
  r.width = 5.0;
  r.length = 6.0;
  r.height = 3.0;
  r.beta = {0, 0, 0, 0, 0, 0};
  r.source_pos = {1.0, 1.0, 1.5};
  r.mic_pos = {1.0 + 1.715, 1.0, 1.5};
  auto rir = simulate_rir(r, 16000, 1000);
  int peak = static_cast<int>(std::max_element(rir.samples.begin(), rir.samples.end(),
                                               [](double a, double b) {
                                                 return std::abs(a) < std::abs(b);
                                               }) -
                              rir.samples.begin());
  CHECK(std::abs(peak - 80) <= 1);
}

TEST_CASE("simulate_rir: higher reflection coefficients carry more energy") {
  RoomSpec lo, hi;
  for (auto* r : {&lo, &hi}) {
    r->width = 4.0;
    r->length = 5.0;
    r->height = 3.0;
    r->source_pos = {1.2, 1.5, 1.4};
    r->mic_pos = {2.8, 3.1, 1.6};
  }
  lo.beta = {0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  hi.beta = {0.9, 0.9, 0.9, 0.9, 0.9, 0.9};
  auto rlo = simulate_rir(lo, 16000, 8000);
  auto rhi = simulate_rir(hi, 16000, 8000);
  double elo = 0.0, ehi = 0.0;
  for (double v : rlo.samples) elo += v * v;
  for (double v : rhi.samples) ehi += v * v;
  CHECK(ehi > elo);
}

TEST_CASE("simulate_rir: truncation never changes the earlier samples") {
  auto room = sample_room(std::uint64_t{5});
  auto short_rir = simulate_rir(room, 16000, 2000);
  auto long_rir = simulate_rir(room, 16000, 4000);
  for (int i = 0; i < 2000; ++i) CHECK(long_rir.samples[i] == short_rir.samples[i]);
}

TEST_CASE("simulate_rir: deterministic in (room, fs, rir_len)") {
  auto room = sample_room(std::uint64_t{9});
  auto a = simulate_rir(room, 16000, 3000);
  auto b = simulate_rir(room, 16000, 3000);
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);
}

TEST_CASE("simulate_rir: block-energy envelope decays in trend") {
  Rng rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    auto room = sample_room(rng);
    auto rir = simulate_rir(room, 16000, 6000);
    const double dist = std::hypot(room.source_pos[0] - room.mic_pos[0],
                                   room.source_pos[1] - room.mic_pos[1],
                                   room.source_pos[2] - room.mic_pos[2]);
    CHECK(dsr_test::rir_decay_trend_ok(rir.samples, 16000, dist / room.c * 16000));
  }
}

TEST_CASE("simulate_rir: geometry violations rejected") {
  RoomSpec r;
  r.mic_pos = {0.05, 1.0, 1.0};  // inside the margin
  CHECK_THROWS_AS(simulate_rir(r, 16000, 1000), std::invalid_argument);
  RoomSpec r2;
  CHECK_THROWS_AS(simulate_rir(r2, 16000, 10), std::invalid_argument);  // shorter than direct
}
