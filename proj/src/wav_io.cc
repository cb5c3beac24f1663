// src/wav_io.cc

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

#include "dsr/wav_io.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace dsr {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
};

std::uint32_t read_u32(std::istream& in, const std::string& path, const char* what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw std::runtime_error("wav: truncated " + std::string(what) + " in " + path);
  return b[0] | (b[1] << 8) | (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

std::uint16_t read_u16(std::istream& in, const std::string& path, const char* what) {
  unsigned char b[2];
  if (!in.read(reinterpret_cast<char*>(b), 2))
    throw std::runtime_error("wav: truncated " + std::string(what) + " in " + path);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

struct ParsedHeader {
  FmtChunk fmt;
  std::streamoff data_offset = 0;
  std::uint32_t data_bytes = 0;
};

// Walks the RIFF chunk list up to (and including) "data".
ParsedHeader parse_header(std::ifstream& in, const std::string& path) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "RIFF", 4) != 0)
    throw std::runtime_error("wav: not a RIFF file: " + path);
  read_u32(in, path, "RIFF size");
  if (!in.read(magic, 4) || std::memcmp(magic, "WAVE", 4) != 0)
    throw std::runtime_error("wav: not a WAVE file: " + path);

  ParsedHeader h;
  bool have_fmt = false;
  while (in.read(magic, 4)) {
    std::uint32_t size = read_u32(in, path, "chunk size");
    if (std::memcmp(magic, "fmt ", 4) == 0) {
      if (size < 16) throw std::runtime_error("wav: malformed fmt chunk in " + path);
      h.fmt.format = read_u16(in, path, "fmt");
      h.fmt.channels = read_u16(in, path, "fmt");
      h.fmt.sample_rate = read_u32(in, path, "fmt");
      read_u32(in, path, "fmt");  // byte rate
      read_u16(in, path, "fmt");  // block align
      h.fmt.bits_per_sample = read_u16(in, path, "fmt");
      std::uint32_t consumed = 16;
      if (h.fmt.format == kFormatExtensible && size >= 26) {
        read_u16(in, path, "fmt");  // cbSize
        read_u16(in, path, "fmt");  // valid bits
        read_u32(in, path, "fmt");  // channel mask
        h.fmt.format = read_u16(in, path, "fmt");  // first two bytes of SubFormat GUID
        consumed = 26;
      }
      in.seekg(size - consumed + (size & 1), std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(magic, "data", 4) == 0) {
      if (!have_fmt) throw std::runtime_error("wav: data chunk before fmt in " + path);
      h.data_offset = in.tellg();
      h.data_bytes = size;
      return h;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
      if (!in) throw std::runtime_error("wav: truncated chunk in " + path);
    }
  }
  throw std::runtime_error("wav: missing data chunk in " + path);
}

WavBitDepth depth_of(const FmtChunk& fmt, const std::string& path) {
  if (fmt.format == kFormatPcm) {
    if (fmt.bits_per_sample == 16) return WavBitDepth::kPcm16;
    if (fmt.bits_per_sample == 24) return WavBitDepth::kPcm24;
    throw std::runtime_error("wav: unsupported PCM bit depth " +
                             std::to_string(fmt.bits_per_sample) + " in " + path);
  }
  if (fmt.format == kFormatFloat) {
    if (fmt.bits_per_sample == 32) return WavBitDepth::kFloat32;
    throw std::runtime_error("wav: unsupported float bit depth " +
                             std::to_string(fmt.bits_per_sample) + " in " + path);
  }
  throw std::runtime_error("wav: unsupported codec (format tag " +
                           std::to_string(fmt.format) + ") in " + path);
}

int bytes_per_sample(WavBitDepth d) {
  switch (d) {
    case WavBitDepth::kPcm16: return 2;
    case WavBitDepth::kPcm24: return 3;
    case WavBitDepth::kFloat32: return 4;
  }
  return 0;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("wav: cannot open file: " + path);
  return in;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<char*>(b), 4);
}

void write_u16(std::ostream& out, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<char*>(b), 2);
}

}  // namespace

WavInfo wav_info(const std::string& path) {
  std::ifstream in = open_input(path);
  ParsedHeader h = parse_header(in, path);
  WavInfo info;
  info.num_channels = h.fmt.channels;
  info.sample_rate = static_cast<int>(h.fmt.sample_rate);
  info.bit_depth = depth_of(h.fmt, path);
  if (h.fmt.channels == 0) throw std::runtime_error("wav: zero channels in " + path);
  int bps = bytes_per_sample(info.bit_depth);
  info.num_frames = h.data_bytes / (static_cast<std::uint64_t>(bps) * h.fmt.channels);
  return info;
}

MultichannelWaveform read_wav_range(const std::string& path, std::uint64_t first_frame,
                                    std::uint64_t count) {
  std::ifstream in = open_input(path);
  ParsedHeader h = parse_header(in, path);
  WavBitDepth depth = depth_of(h.fmt, path);
  const int ch = h.fmt.channels;
  if (ch == 0) throw std::runtime_error("wav: zero channels in " + path);
  const int bps = bytes_per_sample(depth);
  const std::uint64_t frame_bytes = static_cast<std::uint64_t>(bps) * ch;
  const std::uint64_t total_frames = h.data_bytes / frame_bytes;
  if (first_frame > total_frames)
    throw std::runtime_error("wav: read range beyond end of " + path);
  count = std::min(count, total_frames - first_frame);

  std::vector<char> raw(static_cast<std::size_t>(count * frame_bytes));
  in.seekg(h.data_offset + static_cast<std::streamoff>(first_frame * frame_bytes));
  if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size())))
    throw std::runtime_error("wav: truncated data chunk in " + path);

  std::vector<Waveform> channels(ch);
  for (int c = 0; c < ch; ++c) {
    channels[c].sample_rate = static_cast<int>(h.fmt.sample_rate);
    channels[c].samples.resize(count);
  }
  const unsigned char* p = reinterpret_cast<const unsigned char*>(raw.data());
  for (std::uint64_t t = 0; t < count; ++t) {
    for (int c = 0; c < ch; ++c) {
      double v = 0.0;
      switch (depth) {
        case WavBitDepth::kPcm16: {
          std::int16_t s = static_cast<std::int16_t>(p[0] | (p[1] << 8));
          v = s / 32768.0;
          break;
        }
        case WavBitDepth::kPcm24: {
          std::int32_t s = p[0] | (p[1] << 8) | (p[2] << 16);
          if (s & 0x800000) s |= ~0xFFFFFF;
          v = s / 8388608.0;
          break;
        }
        case WavBitDepth::kFloat32: {
          float f;
          std::memcpy(&f, p, 4);
          v = f;
          break;
        }
      }
      channels[c].samples[t] = v;
      p += bps;
    }
  }
  return MultichannelWaveform(std::move(channels));
}

MultichannelWaveform read_wav(const std::string& path) {
  return read_wav_range(path, 0, std::numeric_limits<std::uint64_t>::max());
}

WavWriteReport write_wav(const std::string& path, const MultichannelWaveform& w,
                         WavBitDepth bit_depth) {
  w.validate();
  for (const auto& c : w.channels)
    for (double s : c.samples)
      if (std::isnan(s)) throw std::runtime_error("wav: NaN sample in output for " + path);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("wav: cannot write file: " + path);

  const int ch = static_cast<int>(w.num_channels());
  const std::uint64_t frames = w.num_samples();
  const int bps = bytes_per_sample(bit_depth);
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames * ch * bps);
  const std::uint16_t format = bit_depth == WavBitDepth::kFloat32 ? kFormatFloat : kFormatPcm;

  out.write("RIFF", 4);
  write_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, format);
  write_u16(out, static_cast<std::uint16_t>(ch));
  write_u32(out, static_cast<std::uint32_t>(w.sample_rate()));
  write_u32(out, static_cast<std::uint32_t>(w.sample_rate()) * ch * bps);
  write_u16(out, static_cast<std::uint16_t>(ch * bps));
  write_u16(out, static_cast<std::uint16_t>(bps * 8));
  out.write("data", 4);
  write_u32(out, data_bytes);

  WavWriteReport report;
  std::vector<unsigned char> buf;
  buf.reserve(frames * ch * bps);
  for (std::uint64_t t = 0; t < frames; ++t) {
    for (int c = 0; c < ch; ++c) {
      double v = w.channels[c].samples[t];
      switch (bit_depth) {
        case WavBitDepth::kPcm16: {
          double scaled = std::nearbyint(v * 32768.0);
          if (scaled > 32767.0) { scaled = 32767.0; ++report.clipped_samples; }
          if (scaled < -32768.0) { scaled = -32768.0; ++report.clipped_samples; }
          std::int16_t s = static_cast<std::int16_t>(scaled);
          buf.push_back(static_cast<unsigned char>(s & 0xFF));
          buf.push_back(static_cast<unsigned char>((s >> 8) & 0xFF));
          break;
        }
        case WavBitDepth::kPcm24: {
          double scaled = std::nearbyint(v * 8388608.0);
          if (scaled > 8388607.0) { scaled = 8388607.0; ++report.clipped_samples; }
          if (scaled < -8388608.0) { scaled = -8388608.0; ++report.clipped_samples; }
          std::int32_t s = static_cast<std::int32_t>(scaled);
          buf.push_back(static_cast<unsigned char>(s & 0xFF));
          buf.push_back(static_cast<unsigned char>((s >> 8) & 0xFF));
          buf.push_back(static_cast<unsigned char>((s >> 16) & 0xFF));
          break;
        }
        case WavBitDepth::kFloat32: {
          float f = static_cast<float>(v);
          unsigned char b[4];
          std::memcpy(b, &f, 4);
          buf.insert(buf.end(), b, b + 4);
          break;
        }
      }
    }
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("wav: write failed for " + path);
  return report;
}

WavWriteReport write_wav(const std::string& path, const Waveform& w, WavBitDepth bit_depth) {
  return write_wav(path, MultichannelWaveform({w}), bit_depth);
}

}  // namespace dsr
