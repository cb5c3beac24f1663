// tests/test_augment.cc

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

#include "dsr/augment.h"

#include <cmath>

#include "doctest.h"
#include "dsr/g711.h"
#include "dsr/resample.h"
#include "dsr/room_sim.h"
#include "dsr/stft.h"
#include "testutil.h"

using namespace dsr;

namespace {

Waveform delta_rir(int rate = 16000) {
  Waveform w;
  w.sample_rate = rate;
  w.samples = {1.0};
  return w;
}

double mean_power(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e / x.size();
}

}  // namespace

TEST_CASE("mix: fixed 6 dB with equal-RMS inputs scales the background by ~0.5012") {
  auto primary = dsr_test::sine(500.0, 1.0, 16000, 0.3);
  auto background = dsr_test::sine(400.0, 1.0, 16000, 0.3);
  MixConfig cfg;
  cfg.snr_low_db = 6.0;
  cfg.snr_high_db = 6.0;
  cfg.pad_secs = 0.0;
  cfg.seed = 3;
  auto out = mix_background_speaker(primary, background, delta_rir(), delta_rir(), cfg);
  const double scale = std::sqrt(mean_power(out.reverberated_background.samples) /
                                 mean_power(background.samples));
  CHECK(scale == doctest::Approx(std::pow(10.0, -6.0 / 20.0)).epsilon(1e-3));
  for (std::size_t i = 0; i < primary.num_samples(); ++i)
    CHECK(out.mixture.samples[i] == doctest::Approx(out.reverberated_primary.samples[i] +
                                                    out.reverberated_background.samples[i]));
}

TEST_CASE("mix: measured SNR matches the drawn target within 0.1 dB") {
  Rng gen(17);
  auto room_p = sample_room(std::uint64_t{100});
  auto room_b = sample_room(std::uint64_t{101});
  auto rir_p = simulate_rir(room_p, 16000, 4000);
  auto rir_b = simulate_rir(room_b, 16000, 4000);
  for (int trial = 0; trial < 20; ++trial) {
    // primary longer than the padded background, so the looped slice
    // always contains audible material
    auto primary = dsr_test::speech_like(gen, 12.0, 16000);
    auto background = dsr_test::speech_like(gen, 1.2, 16000);
    MixConfig cfg;
    cfg.seed = 1000 + trial;
    auto out = mix_background_speaker(primary, background, rir_p, rir_b, cfg);
    CHECK(out.snr_db >= 5.0);
    CHECK(out.snr_db <= 12.0);
    const double measured = 10.0 * std::log10(mean_power(out.reverberated_primary.samples) /
                                              mean_power(out.reverberated_background.samples));
    CHECK(std::abs(measured - out.snr_db) <= 0.1);
  }
}

TEST_CASE("mix: background is padded with silence and looped") {
  Waveform primary;
  primary.sample_rate = 16000;
  primary.samples.assign(20 * 16000, 0.05);  // 20 s
  auto background = dsr_test::sine(250.0, 1.0, 16000, 0.4);  // 1 s
  MixConfig cfg;
  cfg.pad_secs = 4.0;
  cfg.seed = 11;
  auto out = mix_background_speaker(primary, background, delta_rir(), delta_rir(), cfg);

  // reconstruct the padded/looped stream and compare against the returned
  // scaled background component
  const std::size_t pad = 4 * 16000;
  std::vector<double> padded(background.num_samples() + 2 * pad, 0.0);
  std::copy(background.samples.begin(), background.samples.end(), padded.begin() + pad);
  REQUIRE(out.offset < padded.size());
  // infer the scale from the loudest sample pair
  double scale = 0.0;
  for (std::size_t n = 0; n < primary.num_samples(); ++n) {
    double b = padded[(out.offset + n) % padded.size()];
    if (std::abs(b) > 0.39) {
      scale = out.reverberated_background.samples[n] / b;
      break;
    }
  }
  REQUIRE(scale > 0.0);
  std::size_t silent = 0;
  for (std::size_t n = 0; n < primary.num_samples(); ++n) {
    double expect = scale * padded[(out.offset + n) % padded.size()];
    CHECK(out.reverberated_background.samples[n] == doctest::Approx(expect).epsilon(1e-9));
    if (expect == 0.0) ++silent;
  }
  CHECK(silent > 0);  // padding visible: 8 of every 9 seconds are silent
}

TEST_CASE("mix: zero-power inputs rejected") {
  Waveform silent;
  silent.sample_rate = 16000;
  silent.samples.assign(16000, 0.0);
  auto tone = dsr_test::sine(300.0, 1.0, 16000, 0.2);
  MixConfig cfg;
  CHECK_THROWS_WITH_AS(mix_background_speaker(silent, tone, delta_rir(), delta_rir(), cfg),
                       doctest::Contains("primary has zero power"), std::runtime_error);
  CHECK_THROWS_WITH_AS(mix_background_speaker(tone, silent, delta_rir(), delta_rir(), cfg),
                       doctest::Contains("background has zero power"), std::runtime_error);
}

TEST_CASE("speed_perturb: factor 1 is the identity") {
  auto w = dsr_test::sine(440.0, 0.5, 16000);
  auto out = speed_perturb(w, 1.0);
  REQUIRE(out.num_samples() == w.num_samples());
  for (std::size_t i = 0; i < w.num_samples(); ++i) CHECK(out.samples[i] == w.samples[i]);
}

TEST_CASE("speed_perturb: 16000 samples at factor 0.9 gives 17778") {
  Waveform w;
  w.sample_rate = 16000;
  w.samples.assign(16000, 0.1);
  CHECK(speed_perturb(w, 0.9).num_samples() == 17778);
  CHECK(speed_perturb(w, 1.1).num_samples() == 14545);  // round(16000/1.1)
}

TEST_CASE("speed_perturb: 1 kHz tone at factor 1.1 moves to 1.1 kHz") {
  auto w = dsr_test::sine(1000.0, 1.0, 16000, 0.5);
  auto out = speed_perturb(w, 1.1);
  StftConfig cfg;
  cfg.fft_size = 8192;
  cfg.window_length = 8192;
  cfg.hop = 2048;
  auto s = stft(out, cfg);
  int t = s.num_frames() / 2, best = 0;
  double best_mag = 0.0;
  for (int k = 0; k < s.num_bins(); ++k) {
    double m = std::abs(s.at(0, t, k));
    if (m > best_mag) {
      best_mag = m;
      best = k;
    }
  }
  const double hz_per_bin = 16000.0 / 8192;
  CHECK(std::abs(best * hz_per_bin - 1100.0) <= hz_per_bin);
}

TEST_CASE("speed_perturb: non-positive factor rejected") {
  auto w = dsr_test::sine(440.0, 0.1, 16000);
  CHECK_THROWS_AS(speed_perturb(w, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(speed_perturb(w, -1.0), std::invalid_argument);
}

TEST_CASE("g711: table spot checks and round-trip bounds") {
  CHECK(linear_to_ulaw(0) == 0xFF);
  CHECK(ulaw_to_linear(0xFF) == 0);
  CHECK(ulaw_to_linear(linear_to_ulaw(32767)) > 31000);
  CHECK(ulaw_to_linear(linear_to_ulaw(-32768)) < -31000);
  CHECK(alaw_to_linear(linear_to_alaw(0)) == 8);  // A-law has no zero code
  // bounded quantization error across the full range, both laws
  for (int x = -32768; x <= 32767; x += 7) {
    const auto pcm = static_cast<std::int16_t>(x);
    const int eu = std::abs(ulaw_to_linear(linear_to_ulaw(pcm)) - x);
    const int ea = std::abs(alaw_to_linear(linear_to_alaw(pcm)) - x);
    CHECK(eu <= std::max(16, std::abs(x) / 16 + 132));
    CHECK(ea <= std::max(32, std::abs(x) / 16 + 16));
  }
  // decode is monotone in the magnitude codes
  for (int c = 0; c < 127; ++c)
    CHECK(ulaw_to_linear(static_cast<std::uint8_t>(0xFF - c)) <=
          ulaw_to_linear(static_cast<std::uint8_t>(0xFF - c - 1)));
}

TEST_CASE("apply_codec: zeros stay zeros under G.711") {
  Waveform w;
  w.sample_rate = 16000;
  w.samples.assign(8000, 0.0);
  MixConfig cfg;
  cfg.codec_prob = 1.0;
  auto out = apply_codec(w, Codec::kG711Ulaw, cfg);
  CHECK(out.applied);
  for (double s : out.audio.samples) CHECK(std::abs(s) < 1e-6);
}

TEST_CASE("apply_codec: u-law round trip keeps segmental SNR >= 25 dB") {
  Rng rng(5);
  auto wide = dsr_test::speech_like(rng, 2.0, 16000);
  // band-limit to the narrowband codec's range first
  auto w = resample(resample(wide, 8000), 16000);
  w.samples.resize(wide.num_samples(), 0.0);
  MixConfig cfg;
  cfg.codec_prob = 1.0;
  auto out = apply_codec(w, Codec::kG711Ulaw, cfg);
  REQUIRE(out.applied);
  const int frame = 320;  // 20 ms
  double acc = 0.0;
  int count = 0;
  for (std::size_t off = 0; off + frame <= w.num_samples(); off += frame) {
    double se = 0.0, ne = 0.0;
    for (int i = 0; i < frame; ++i) {
      const double s = w.samples[off + i];
      const double d = s - out.audio.samples[off + i];
      se += s * s;
      ne += d * d;
    }
    if (se < 1e-8) continue;  // skip silence
    double snr = 10.0 * std::log10(se / std::max(ne, 1e-30));
    acc += std::min(snr, 35.0);
    ++count;
  }
  REQUIRE(count > 0);
  CHECK(acc / count >= 25.0);
}

TEST_CASE("apply_codec: probability 0 is always the identity") {
  auto w = dsr_test::sine(700.0, 0.3, 16000, 0.4);
  MixConfig cfg;
  cfg.codec_prob = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    auto out = apply_codec(w, Codec::kG711Ulaw, cfg);
    CHECK_FALSE(out.applied);
    CHECK(out.audio.samples == w.samples);
  }
}

TEST_CASE("apply_codec: external command hook") {
  auto w = dsr_test::sine(600.0, 0.3, 16000, 0.4);
  MixConfig cfg;
  cfg.codec_prob = 1.0;

  SUBCASE("pass-through command") {
    cfg.codec_cmd = "cat";
    auto out = apply_codec(w, Codec::kExternal, cfg);
    CHECK(out.applied);
    CHECK(out.warning.empty());
    REQUIRE(out.audio.num_samples() == w.num_samples());
    for (std::size_t i = 0; i < w.num_samples(); ++i)
      CHECK(std::abs(out.audio.samples[i] - w.samples[i]) <= std::pow(2.0, -15));
  }
  SUBCASE("failing command returns the input with a warning") {
    cfg.codec_cmd = "false";
    auto out = apply_codec(w, Codec::kExternal, cfg);
    CHECK_FALSE(out.applied);
    CHECK(!out.warning.empty());
    CHECK(out.audio.samples == w.samples);
  }
}
