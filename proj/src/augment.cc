// src/augment.cc

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

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>

#include "dsr/g711.h"
#include "dsr/resample.h"
#include "dsr/rng.h"
#include "dsr/stft.h"
#include "dsr/wav_io.h"

namespace dsr {

namespace {

double mean_power(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return x.empty() ? 0.0 : e / x.size();
}

// convolution truncated to the length of the first argument
std::vector<double> convolve_same(const std::vector<double>& x,
                                  const std::vector<double>& h) {
  auto full = fft_convolve(x, h);
  full.resize(x.size());
  return full;
}

Waveform g711_roundtrip(const Waveform& w, bool alaw) {
  const int rate = w.sample_rate;
  Waveform narrow = rate == 8000 ? w : resample(w, 8000);
  for (auto& s : narrow.samples) {
    double scaled = std::nearbyint(s * 32768.0);
    scaled = std::min(32767.0, std::max(-32768.0, scaled));
    const std::int16_t pcm = static_cast<std::int16_t>(scaled);
    const std::int16_t back =
        alaw ? alaw_to_linear(linear_to_alaw(pcm)) : ulaw_to_linear(linear_to_ulaw(pcm));
    s = back / 32768.0;
  }
  if (rate == 8000) return narrow;
  Waveform out = resample(narrow, rate);
  out.samples.resize(w.num_samples(), 0.0);
  return out;
}

// Runs `cmd < in.wav > out.wav` in a scratch directory.
Waveform external_codec(const Waveform& w, const std::string& cmd, std::string* warning) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() /
                 ("dsr_codec_" + std::to_string(::getpid()) + "_" +
                  std::to_string(reinterpret_cast<std::uintptr_t>(&w)));
  std::error_code ec;
  fs::create_directories(dir, ec);
  const std::string in_path = (dir / "in.wav").string();
  const std::string out_path = (dir / "out.wav").string();
  Waveform result = w;
  try {
    write_wav(in_path, w, WavBitDepth::kPcm16);
    const std::string full = cmd + " < '" + in_path + "' > '" + out_path + "'";
    const int status = std::system(full.c_str());
    if (status != 0) throw std::runtime_error("command exited with status " +
                                              std::to_string(status));
    auto decoded = read_wav(out_path);
    Waveform c = std::move(decoded.channels[0]);
    if (c.sample_rate != w.sample_rate) c = resample(c, w.sample_rate);
    c.samples.resize(w.num_samples(), 0.0);
    result = std::move(c);
  } catch (const std::exception& e) {
    *warning = std::string("external codec failed, audio passed through: ") + e.what();
  }
  fs::remove_all(dir, ec);
  return result;
}

}  // namespace

void MixConfig::validate() const {
  if (snr_low_db > snr_high_db)
    throw std::invalid_argument("MixConfig: snr_low_db must be <= snr_high_db");
  if (pad_secs < 0.0) throw std::invalid_argument("MixConfig: pad_secs must be >= 0");
  if (codec_prob < 0.0 || codec_prob > 1.0)
    throw std::invalid_argument("MixConfig: codec_prob must be in [0, 1]");
}

MixResult mix_background_speaker(const Waveform& primary, const Waveform& background,
                                 const Waveform& rir_primary, const Waveform& rir_background,
                                 const MixConfig& cfg) {
  cfg.validate();
  if (primary.sample_rate != background.sample_rate)
    throw std::invalid_argument("mix_background_speaker: sample rates differ");
  if (mean_power(primary.samples) <= 0.0)
    throw std::runtime_error("mix_background_speaker: primary has zero power");
  if (mean_power(background.samples) <= 0.0)
    throw std::runtime_error("mix_background_speaker: background has zero power");

  const std::size_t len = primary.num_samples();
  const std::size_t pad =
      static_cast<std::size_t>(std::lround(cfg.pad_secs * primary.sample_rate));

  // silence on both sides, then a random circularly-looped start offset
  std::vector<double> padded(background.num_samples() + 2 * pad, 0.0);
  std::copy(background.samples.begin(), background.samples.end(), padded.begin() + pad);

  Rng rng(cfg.seed);
  const std::size_t offset = static_cast<std::size_t>(rng.uniform_int(padded.size()));
  const double snr_db = rng.uniform(cfg.snr_low_db, cfg.snr_high_db);

  std::vector<double> bg_stream(len);
  for (std::size_t n = 0; n < len; ++n) bg_stream[n] = padded[(offset + n) % padded.size()];

  MixResult out;
  out.snr_db = snr_db;
  out.offset = offset;
  out.reverberated_primary.sample_rate = primary.sample_rate;
  out.reverberated_primary.samples = convolve_same(primary.samples, rir_primary.samples);
  out.reverberated_background.sample_rate = primary.sample_rate;
  out.reverberated_background.samples = convolve_same(bg_stream, rir_background.samples);

  const double p_primary = mean_power(out.reverberated_primary.samples);
  const double p_background = mean_power(out.reverberated_background.samples);
  if (p_background <= 0.0)
    throw std::runtime_error(
        "mix_background_speaker: background slice has zero power after padding");
  const double scale = std::sqrt(p_primary / (p_background * std::pow(10.0, snr_db / 10.0)));
  for (auto& s : out.reverberated_background.samples) s *= scale;

  out.mixture.sample_rate = primary.sample_rate;
  out.mixture.samples.resize(len);
  for (std::size_t n = 0; n < len; ++n)
    out.mixture.samples[n] =
        out.reverberated_primary.samples[n] + out.reverberated_background.samples[n];
  return out;
}

Waveform speed_perturb(const Waveform& w, double factor) {
  if (factor <= 0.0) throw std::invalid_argument("speed_perturb: factor must be > 0");
  if (factor == 1.0) return w;
  const std::size_t out_len =
      static_cast<std::size_t>(std::lround(w.num_samples() / factor));
  return resample_by_step(w, factor, out_len);
}

CodecResult apply_codec(const Waveform& w, Codec codec, const MixConfig& cfg) {
  cfg.validate();
  CodecResult out;
  Rng rng(cfg.seed);
  if (rng.uniform() >= cfg.codec_prob) {
    out.audio = w;
    out.applied = false;
    return out;
  }
  out.applied = true;
  switch (codec) {
    case Codec::kG711Ulaw:
      out.audio = g711_roundtrip(w, false);
      break;
    case Codec::kG711Alaw:
      out.audio = g711_roundtrip(w, true);
      break;
    case Codec::kExternal: {
      if (cfg.codec_cmd.empty()) {
        out.audio = w;
        out.applied = false;
        out.warning = "external codec requested but no command configured";
        return out;
      }
      out.audio = external_codec(w, cfg.codec_cmd, &out.warning);
      if (!out.warning.empty()) out.applied = false;
      break;
    }
  }
  return out;
}

}  // namespace dsr
