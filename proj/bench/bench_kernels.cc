// bench/bench_kernels.cc

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

// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include "dsr/cacgmm.h"
#include "dsr/eigen_util.h"
#include "dsr/rng.h"
#include "dsr/stft.h"
#include "dsr/wpe.h"

namespace {

using namespace dsr;

MultichannelWaveform bench_audio(int channels, double seconds) {
  Rng rng(1);
  std::vector<Waveform> chans;
  for (int c = 0; c < channels; ++c) {
    Waveform w;
    w.sample_rate = 16000;
    w.samples.resize(static_cast<std::size_t>(seconds * 16000));
    for (auto& s : w.samples) s = 0.1 * rng.gaussian();
    chans.push_back(std::move(w));
  }
  return MultichannelWaveform(std::move(chans));
}

Spectrogram bench_spec(int channels, int frames, int bins) {
  Rng rng(2);
  StftConfig cfg;
  cfg.fft_size = (bins - 1) * 2;
  cfg.window_length = cfg.fft_size;
  cfg.hop = cfg.fft_size / 4;
  Spectrogram s(channels, frames, bins, cfg, 16000);
  for (auto& v : s.data()) v = Cplx(rng.gaussian(), rng.gaussian());
  return s;
}

ActivityGrid bench_grid(int frames) {
  ActivityGrid grid;
  grid.speakers = {"A", "B"};
  grid.num_frames = frames;
  grid.target_row = 0;
  grid.activity.assign(2 * static_cast<std::size_t>(frames), 0);
  for (int t = 0; t < frames; ++t) {
    if (t < 2 * frames / 3) grid.set_active(0, t, true);
    if (t >= frames / 3) grid.set_active(1, t, true);
  }
  return grid;
}

void BM_stft_parallel(benchmark::State& state) {
  auto audio = bench_audio(4, 10.0);
  StftConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(stft(audio, cfg));
}
BENCHMARK(BM_stft_parallel)->Unit(benchmark::kMillisecond);

void BM_stft_serial(benchmark::State& state) {
  auto audio = bench_audio(4, 10.0);
  StftConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(serial::stft(audio, cfg));
}
BENCHMARK(BM_stft_serial)->Unit(benchmark::kMillisecond);

void BM_wpe_parallel(benchmark::State& state) {
  auto spec = bench_spec(2, 200, 65);
  for (auto _ : state) benchmark::DoNotOptimize(wpe(spec));
}
BENCHMARK(BM_wpe_parallel)->Unit(benchmark::kMillisecond);

void BM_wpe_serial(benchmark::State& state) {
  auto spec = bench_spec(2, 200, 65);
  for (auto _ : state) benchmark::DoNotOptimize(serial::wpe(spec));
}
BENCHMARK(BM_wpe_serial)->Unit(benchmark::kMillisecond);

void BM_cacgmm_parallel(benchmark::State& state) {
  auto spec = bench_spec(3, 90, 33);
  auto grid = bench_grid(90);
  CacgmmConfig cfg;
  cfg.iterations = 5;
  for (auto _ : state) benchmark::DoNotOptimize(fit_guided_cacgmm(spec, grid, cfg));
}
BENCHMARK(BM_cacgmm_parallel)->Unit(benchmark::kMillisecond);

void BM_cacgmm_serial(benchmark::State& state) {
  auto spec = bench_spec(3, 90, 33);
  auto grid = bench_grid(90);
  CacgmmConfig cfg;
  cfg.iterations = 5;
  for (auto _ : state) benchmark::DoNotOptimize(serial::fit_guided_cacgmm(spec, grid, cfg));
}
BENCHMARK(BM_cacgmm_serial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
