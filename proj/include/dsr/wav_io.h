// include/dsr/wav_io.h

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

#ifndef DSR_WAV_IO_H_
#define DSR_WAV_IO_H_

#include <cstdint>
#include <string>

#include "dsr/waveform.h"

namespace dsr {

enum class WavBitDepth { kPcm16, kPcm24, kFloat32 };

struct WavInfo {
  int num_channels = 0;
  int sample_rate = 0;
  std::uint64_t num_frames = 0;  // samples per channel
  WavBitDepth bit_depth = WavBitDepth::kPcm16;
};

// Header-only probe; does not decode samples.
WavInfo wav_info(const std::string& path);

// Reads a RIFF/WAVE file (PCM 16/24-bit or IEEE float32). Integer samples
// are scaled to [-1, 1] by the full-scale divisor (2^15 or 2^23).
// Errors are reported distinctly: missing file, unsupported codec or bit
// depth, truncated chunk.
MultichannelWaveform read_wav(const std::string& path);

// Reads frames [first_frame, first_frame + count) only.
MultichannelWaveform read_wav_range(const std::string& path,
                                    std::uint64_t first_frame,
                                    std::uint64_t count);

struct WavWriteReport {
  std::size_t clipped_samples = 0;  // saturated when quantizing (PCM only)
};

// Writes all channels interleaved. Integer depths saturate out-of-range
// samples and report how many were clipped. NaN in the input is an error.
WavWriteReport write_wav(const std::string& path, const MultichannelWaveform& w,
                         WavBitDepth bit_depth = WavBitDepth::kFloat32);

WavWriteReport write_wav(const std::string& path, const Waveform& w,
                         WavBitDepth bit_depth = WavBitDepth::kFloat32);

}  // namespace dsr

#endif  // DSR_WAV_IO_H_
