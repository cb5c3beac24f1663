// include/dsr/room_sim.h

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

#ifndef DSR_ROOM_SIM_H_
#define DSR_ROOM_SIM_H_

#include <array>
#include <cstdint>

#include "dsr/rng.h"
#include "dsr/waveform.h"

namespace dsr {

// Shoebox room for the image-method simulator. Walls are indexed
// x-lo, x-hi, y-lo, y-hi, z-lo, z-hi; positions keep a 0.1 m margin.
struct RoomSpec {
  double width = 4.0;   // x
  double length = 6.0;  // y
  double height = 2.8;  // z
  std::array<double, 6> beta = {0.7, 0.7, 0.7, 0.7, 0.7, 0.7};
  std::array<double, 3> source_pos = {1.0, 1.0, 1.5};
  std::array<double, 3> mic_pos = {2.0, 2.0, 1.5};
  double c = 343.0;  // m/s

  void validate() const;
};

constexpr double kPlacementMargin = 0.1;

// Uniform room draw over the simulator's training ranges:
// width [1.5, 5.5], height [2.0, 9.5], length [2.5, 16.5], per-wall
// reflection [0.45, 0.95]; source and microphone uniform inside with the
// placement margin.
RoomSpec sample_room(Rng& rng);
RoomSpec sample_room(std::uint64_t seed);

// Allen-Berkley image method with an 81-tap windowed-sinc fractional
// delay. Deterministic in (room, fs, rir_len). Every image whose kernel
// support touches [0, rir_len) is included, so a longer rir_len never
// changes the earlier samples.
Waveform simulate_rir(const RoomSpec& room, int fs, int rir_len);

}  // namespace dsr

#endif  // DSR_ROOM_SIM_H_
