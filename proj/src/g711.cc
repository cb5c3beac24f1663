// src/g711.cc

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

#include "dsr/g711.h"

namespace dsr {

namespace {

constexpr std::int16_t kUlawBias = 0x84;
constexpr std::int16_t kUlawClip = 8159;  // 14-bit magnitude ceiling
constexpr std::uint8_t kQuantMask = 0x0F;
constexpr std::uint8_t kSegMask = 0x70;
constexpr int kSegShift = 4;
constexpr std::uint8_t kSignBit = 0x80;

int segment_of(std::int16_t val, const std::int16_t* bounds) {
  for (int s = 0; s < 8; ++s)
    if (val <= bounds[s]) return s;
  return 8;
}

constexpr std::int16_t kUlawSegEnd[8] = {0x3F, 0x7F, 0xFF, 0x1FF,
                                         0x3FF, 0x7FF, 0xFFF, 0x1FFF};
constexpr std::int16_t kAlawSegEnd[8] = {0x1F, 0x3F, 0x7F, 0xFF,
                                         0x1FF, 0x3FF, 0x7FF, 0xFFF};

}  // namespace

std::uint8_t linear_to_ulaw(std::int16_t pcm) {
  std::int16_t mask;
  std::int16_t val = static_cast<std::int16_t>(pcm >> 2);  // 16 -> 14 bit
  if (val < 0) {
    val = static_cast<std::int16_t>(-val);
    mask = 0x7F;
  } else {
    mask = 0xFF;
  }
  if (val > kUlawClip) val = kUlawClip;
  val = static_cast<std::int16_t>(val + (kUlawBias >> 2));
  const int seg = segment_of(val, kUlawSegEnd);
  if (seg >= 8) return static_cast<std::uint8_t>(0x7F ^ mask);
  const std::uint8_t code =
      static_cast<std::uint8_t>((seg << kSegShift) | ((val >> (seg + 1)) & kQuantMask));
  return static_cast<std::uint8_t>(code ^ mask);
}

std::int16_t ulaw_to_linear(std::uint8_t code) {
  code = static_cast<std::uint8_t>(~code);
  std::int16_t t =
      static_cast<std::int16_t>(((code & kQuantMask) << 3) + kUlawBias);
  t = static_cast<std::int16_t>(t << ((code & kSegMask) >> kSegShift));
  return (code & kSignBit) ? static_cast<std::int16_t>(kUlawBias - t)
                           : static_cast<std::int16_t>(t - kUlawBias);
}

std::uint8_t linear_to_alaw(std::int16_t pcm) {
  std::uint8_t mask;
  std::int16_t val = static_cast<std::int16_t>(pcm >> 3);  // 16 -> 13 bit
  if (val >= 0) {
    mask = 0xD5;  // sign bit stays set, with even-bit inversion
  } else {
    mask = 0x55;
    val = static_cast<std::int16_t>(-val - 1);
  }
  const int seg = segment_of(val, kAlawSegEnd);
  if (seg >= 8) return static_cast<std::uint8_t>(0x7F ^ mask);
  std::uint8_t code = static_cast<std::uint8_t>(seg << kSegShift);
  code |= (seg < 2 ? (val >> 1) : (val >> seg)) & kQuantMask;
  return static_cast<std::uint8_t>(code ^ mask);
}

std::int16_t alaw_to_linear(std::uint8_t code) {
  code ^= 0x55;
  std::int16_t t = static_cast<std::int16_t>((code & kQuantMask) << 4);
  const int seg = (code & kSegMask) >> kSegShift;
  switch (seg) {
    case 0:
      t = static_cast<std::int16_t>(t + 8);
      break;
    case 1:
      t = static_cast<std::int16_t>(t + 0x108);
      break;
    default:
      t = static_cast<std::int16_t>((t + 0x108) << (seg - 1));
      break;
  }
  return (code & kSignBit) ? t : static_cast<std::int16_t>(-t);
}

}  // namespace dsr
