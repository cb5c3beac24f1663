// tests/test_wpe.cc

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

#include "dsr/wpe.h"

#include "doctest.h"
#include "dsr/eigen_util.h"
#include "testutil.h"

using namespace dsr;

namespace {

Spectrogram random_spec(dsr::Rng& rng, int channels, int frames, int bins) {
  StftConfig cfg;
  cfg.fft_size = (bins - 1) * 2;
  cfg.window_length = cfg.fft_size;
  cfg.hop = cfg.fft_size / 4;
  Spectrogram s(channels, frames, bins, cfg, 16000);
  for (auto& v : s.data()) v = Cplx(rng.gaussian(), rng.gaussian());
  return s;
}

double total_energy(const Spectrogram& s) {
  double e = 0.0;
  for (const auto& v : s.data()) e += std::norm(v);
  return e;
}

}  // namespace

TEST_CASE("wpe: zero input stays zero") {
  StftConfig cfg;
  Spectrogram s(2, 40, 33, cfg, 16000);
  auto out = wpe(s);
  CHECK(total_energy(out) == 0.0);
  CHECK(out.num_frames() == 40);
  CHECK(out.num_channels() == 2);
}

TEST_CASE("wpe: white noise passes through within 1 dB") {
  dsr::Rng rng(100);
  for (int trial = 0; trial < 3; ++trial) {
    auto s = random_spec(rng, 2, 150, 17);
    auto out = wpe(s);
    double ratio_db = 10.0 * std::log10(total_energy(out) / total_energy(s));
    CHECK(std::abs(ratio_db) < 1.0);
  }
}

TEST_CASE("wpe: suppresses a synthetic late echo by at least 10 dB") {
  dsr::Rng rng(200);
  const int frames = 160, bins = 17, echo_lag = 3;
  const double gain = 0.5;  // -6 dB
  StftConfig cfg;
  Spectrogram clean(1, frames, bins, cfg, 16000);
  for (auto& v : clean.data()) v = Cplx(rng.gaussian(), rng.gaussian());
  Spectrogram mixed = clean;
  for (int t = echo_lag; t < frames; ++t)
    for (int k = 0; k < bins; ++k)
      mixed.at(0, t, k) += gain * clean.at(0, t - echo_lag, k);

  // the probe has no noise floor of its own, so pin the PSD floor to the
  // mixture's scale; the absolute default would leave the 1/lambda weights
  // heavy-tailed on gaussian frames and stall the filter estimate
  WpeConfig wcfg;
  double mean_power = 0.0;
  for (const auto& v : mixed.data()) mean_power += std::norm(v);
  mean_power /= static_cast<double>(mixed.data().size());
  wcfg.psd_floor = 0.5 * mean_power;

  auto out = wpe(mixed, wcfg);  // default delay 2, taps 10 cover lag 3

  // energy of the projection onto the delayed reference, before and after
  auto echo_energy = [&](const Spectrogram& s) {
    double total = 0.0;
    for (int k = 0; k < bins; ++k) {
      Cplx dot = 0.0;
      double ref = 0.0;
      for (int t = echo_lag; t < frames; ++t) {
        dot += s.at(0, t, k) * std::conj(clean.at(0, t - echo_lag, k));
        ref += std::norm(clean.at(0, t - echo_lag, k));
      }
      total += std::norm(dot) / ref;
    }
    return total;
  };
  double before = echo_energy(mixed);
  double after = echo_energy(out);
  CHECK(10.0 * std::log10(before / after) >= 10.0);
}

TEST_CASE("wpe: equivariant to a complex scale") {
  dsr::Rng rng(300);
  auto s = random_spec(rng, 2, 80, 9);
  const Cplx scale(0.3, -1.2);
  Spectrogram scaled = s;
  for (auto& v : scaled.data()) v *= scale;
  auto a = wpe(s);
  auto b = wpe(scaled);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    num += std::norm(b.data()[i] - scale * a.data()[i]);
    den += std::norm(scale * a.data()[i]);
  }
  CHECK(std::sqrt(num / den) < 1e-6);
}

TEST_CASE("wpe: prediction residual orthogonal to the history at the final weights") {
  dsr::Rng rng(400);
  const int frames = 100, bins = 5;
  auto s = random_spec(rng, 2, frames, bins);
  // echo makes the filter non-trivial
  for (int t = 3; t < frames; ++t)
    for (int k = 0; k < bins; ++k) s.at(0, t, k) += 0.4 * s.at(0, t - 3, k);

  WpeConfig cfg;
  WpeConfig prev_cfg = cfg;
  prev_cfg.iterations = cfg.iterations - 1;
  auto prev = prev_cfg.iterations >= 1 ? wpe(s, prev_cfg) : s;
  auto final_out = wpe(s, cfg);

  const int num_ch = 2, stack = num_ch * cfg.taps;
  for (int k = 0; k < bins; ++k) {
    MatrixXc x = bin_matrix(s, k);
    MatrixXc xp = bin_matrix(prev, k);
    MatrixXc xf = bin_matrix(final_out, k);
    MatrixXc resid = MatrixXc::Zero(stack, num_ch);
    MatrixXc cross = MatrixXc::Zero(stack, num_ch);
    for (int t = 0; t < frames; ++t) {
      double lambda = std::max(cfg.psd_floor, xp.col(t).squaredNorm() / num_ch);
      VectorXc v = VectorXc::Zero(stack);
      for (int j = 0; j < cfg.taps; ++j) {
        int src = t - cfg.delay - j;
        if (src >= 0) v.segment(j * num_ch, num_ch) = x.col(src);
      }
      resid += v * xf.col(t).adjoint() / lambda;
      cross += v * x.col(t).adjoint() / lambda;
    }
    CHECK(resid.norm() <= 1e-4 * cross.norm());
  }
}

TEST_CASE("wpe: too-short input rejected") {
  StftConfig cfg;
  Spectrogram s(2, 12, 9, cfg, 16000);  // 12 <= taps + delay
  CHECK_THROWS_AS(wpe(s), std::invalid_argument);
}

TEST_CASE("wpe: parallel kernel matches the serial reference") {
  dsr::Rng rng(500);
  auto s = random_spec(rng, 3, 90, 9);
  for (int t = 4; t < 90; ++t)
    for (int k = 0; k < 9; ++k) s.at(1, t, k) += 0.3 * s.at(0, t - 4, k);
  auto a = wpe(s);
  auto b = serial::wpe(s);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    num += std::norm(a.data()[i] - b.data()[i]);
    den += std::norm(b.data()[i]);
  }
  CHECK(std::sqrt(num / den) < 1e-8);
}
