// src/manifest.cc

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

#include "dsr/manifest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "dsr/resample.h"
#include "dsr/rng.h"
#include "dsr/wav_io.h"

namespace dsr {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw std::runtime_error("manifest: " + where + ": " + what);
}

double require_number(const json& j, const std::string& where, const char* field) {
  if (!j.contains(field) || !j[field].is_number())
    schema_error(where + "." + field, "missing or not a number");
  return j[field].get<double>();
}

std::string require_string(const json& j, const std::string& where, const char* field) {
  if (!j.contains(field) || !j[field].is_string())
    schema_error(where + "." + field, "missing or not a string");
  return j[field].get<std::string>();
}

// half-open sample intervals, merged
std::vector<std::pair<long, long>> merge_intervals(std::vector<std::pair<long, long>> v) {
  std::sort(v.begin(), v.end());
  std::vector<std::pair<long, long>> out;
  for (const auto& iv : v) {
    if (iv.first >= iv.second) continue;
    if (!out.empty() && iv.first <= out.back().second)
      out.back().second = std::max(out.back().second, iv.second);
    else
      out.push_back(iv);
  }
  return out;
}

// coverage of [a, b) by the merged interval set
long covered(const std::vector<std::pair<long, long>>& merged, long a, long b) {
  long total = 0;
  for (const auto& iv : merged) {
    long lo = std::max(a, iv.first);
    long hi = std::min(b, iv.second);
    if (hi > lo) total += hi - lo;
  }
  return total;
}

}  // namespace

ActivityGrid ActivityGrid::without_inactive_rows() const {
  ActivityGrid out;
  out.num_frames = num_frames;
  out.stft = stft;
  for (int r = 0; r < num_speakers(); ++r) {
    bool any = false;
    for (int t = 0; t < num_frames && !any; ++t) any = active(r, t);
    if (any || r == target_row) {
      if (r == target_row) out.target_row = static_cast<int>(out.speakers.size());
      out.speakers.push_back(speakers[r]);
      out.activity.insert(out.activity.end(),
                          activity.begin() + static_cast<std::size_t>(r) * num_frames,
                          activity.begin() + static_cast<std::size_t>(r + 1) * num_frames);
    }
  }
  return out;
}

SessionManifest load_session_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("manifest: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("manifest: invalid JSON in " + path + ": " + e.what());
  }

  SessionManifest m;
  m.session_id = require_string(j, "$", "session_id");
  if (!j.contains("channels") || !j["channels"].is_array() || j["channels"].empty())
    schema_error("$.channels", "must be a non-empty array of file paths");
  for (const auto& c : j["channels"]) {
    if (!c.is_string()) schema_error("$.channels", "entries must be strings");
    m.channel_paths.push_back(c.get<std::string>());
  }

  // probe the audio; every channel file must exist, be mono, and agree
  for (std::size_t i = 0; i < m.channel_paths.size(); ++i) {
    WavInfo info;
    try {
      info = wav_info(m.channel_paths[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("manifest: missing audio file for channel " +
                               std::to_string(i) + ": " + e.what());
    }
    if (info.num_channels != 1)
      schema_error("$.channels[" + std::to_string(i) + "]", "channel files must be mono");
    if (i == 0) {
      m.sample_rate = info.sample_rate;
      m.num_frames = info.num_frames;
    } else if (info.sample_rate != m.sample_rate || info.num_frames != m.num_frames) {
      schema_error("$.channels[" + std::to_string(i) + "]",
                   "sample rate or length differs from channel 0");
    }
  }

  if (j.contains("segments")) {
    if (!j["segments"].is_array()) schema_error("$.segments", "must be an array");
    std::set<std::string> seen;
    int idx = 0;
    for (const auto& s : j["segments"]) {
      const std::string where = "$.segments[" + std::to_string(idx++) + "]";
      SegmentAnnotation a;
      a.utt_id = require_string(s, where, "utt_id");
      a.speaker_id = require_string(s, where, "speaker");
      a.start = require_number(s, where, "start");
      a.end = require_number(s, where, "end");
      a.group_key = s.contains("group") ? require_string(s, where, "group") : "";
      if (a.start < 0.0 || a.end <= a.start)
        schema_error(where, "require 0 <= start < end (utt_id=" + a.utt_id + ")");
      if (a.end > m.duration_seconds() + 1e-9)
        schema_error(where, "segment extends past the recording (utt_id=" + a.utt_id + ")");
      if (!seen.insert(a.utt_id).second)
        schema_error(where, "duplicate utt_id " + a.utt_id);
      m.segments.push_back(std::move(a));
    }
  }
  return m;
}

CutSegment cut_segment_with_context(const SessionManifest& m, const std::string& utt_id,
                                    double context_secs, const StftConfig& cfg) {
  if (context_secs < 0.0)
    throw std::invalid_argument("cut_segment_with_context: context_secs must be >= 0");
  const SegmentAnnotation* seg = nullptr;
  for (const auto& s : m.segments)
    if (s.utt_id == utt_id) seg = &s;
  if (!seg) throw std::runtime_error("cut_segment_with_context: unknown utt_id " + utt_id);

  const int rate = kInternalSampleRate;
  const bool native = m.sample_rate == rate;
  // recording length expressed at the processing rate
  const long rec_len = native ? static_cast<long>(m.num_frames)
                              : std::lround(static_cast<double>(m.num_frames) * rate /
                                            m.sample_rate);

  const long seg_begin = std::lround(seg->start * rate);
  const long seg_end = std::min(rec_len, std::lround(seg->end * rate));
  const long ctx = std::lround(context_secs * rate);
  const long cut_begin = std::max(0L, seg_begin - ctx);
  const long cut_end = std::min(rec_len, seg_end + ctx);
  const long cut_len = cut_end - cut_begin;

  std::vector<Waveform> channels;
  channels.reserve(m.channel_paths.size());
  for (const auto& path : m.channel_paths) {
    if (native) {
      auto w = read_wav_range(path, static_cast<std::uint64_t>(cut_begin),
                              static_cast<std::uint64_t>(cut_len));
      channels.push_back(std::move(w.channels[0]));
    } else {
      auto w = resample(read_wav(path).channels[0], rate);
      Waveform c;
      c.sample_rate = rate;
      c.samples.assign(w.samples.begin() + std::min<long>(cut_begin, w.num_samples()),
                       w.samples.begin() + std::min<long>(cut_end, w.num_samples()));
      c.samples.resize(cut_len, 0.0);
      channels.push_back(std::move(c));
    }
  }

  CutSegment out;
  out.audio = MultichannelWaveform(std::move(channels));

  const int frames = stft_num_frames(static_cast<std::size_t>(cut_len), cfg);
  const int hop = cfg.hop;

  CoreRegion core;
  core.sample_begin = seg_begin - cut_begin;
  core.sample_end = seg_end - cut_begin;
  {
    std::vector<std::pair<long, long>> iv = {{core.sample_begin, core.sample_end}};
    int first = -1, last = -1;
    for (int t = 0; t < frames; ++t) {
      if (covered(iv, static_cast<long>(t) * hop, static_cast<long>(t + 1) * hop) * 2 >= hop) {
        if (first < 0) first = t;
        last = t;
      }
    }
    if (first < 0) {
      // segment shorter than half a hop: pin the frame holding its midpoint
      first = last = static_cast<int>(
          std::clamp<long>((core.sample_begin + core.sample_end) / 2 / hop, 0, frames - 1));
    }
    core.frame_begin = first;
    core.frame_end = last + 1;
  }
  out.core = core;

  // activity of every speaker whose segments intersect the padded window
  ActivityGrid grid;
  grid.num_frames = frames;
  grid.stft = cfg;
  std::map<std::string, std::vector<std::pair<long, long>>> spans;
  std::vector<std::string> order;
  for (const auto& s : m.segments) {
    const long a = std::lround(s.start * rate) - cut_begin;
    const long b = std::lround(s.end * rate) - cut_begin;
    if (b <= 0 || a >= cut_len) continue;
    if (spans.find(s.speaker_id) == spans.end()) order.push_back(s.speaker_id);
    spans[s.speaker_id].emplace_back(std::max(0L, a), std::min(cut_len, b));
  }
  grid.speakers = order;
  grid.activity.assign(static_cast<std::size_t>(order.size()) * frames, 0);
  for (int r = 0; r < grid.num_speakers(); ++r) {
    auto merged = merge_intervals(spans[order[r]]);
    for (int t = 0; t < frames; ++t)
      if (covered(merged, static_cast<long>(t) * hop, static_cast<long>(t + 1) * hop) * 2 >=
          hop)
        grid.set_active(r, t, true);
  }
  grid.target_row =
      static_cast<int>(std::find(order.begin(), order.end(), seg->speaker_id) -
                       order.begin());
  // the defining segment can be shorter than half a hop; keep the invariant
  bool target_core_active = false;
  for (int t = core.frame_begin; t < core.frame_end; ++t)
    target_core_active = target_core_active || grid.active(grid.target_row, t);
  if (!target_core_active)
    for (int t = core.frame_begin; t < core.frame_end; ++t)
      grid.set_active(grid.target_row, t, true);
  out.activity = std::move(grid);
  return out;
}

std::vector<SegmentAnnotation> subset_by_hours(const std::vector<SegmentAnnotation>& entries,
                                               double target_hours, std::uint64_t seed) {
  if (target_hours <= 0.0)
    throw std::invalid_argument("subset_by_hours: target_hours must be > 0");
  const double target_secs = target_hours * 3600.0;

  std::map<std::string, std::vector<std::size_t>> groups;  // sorted keys
  for (std::size_t i = 0; i < entries.size(); ++i)
    groups[entries[i].group_key].push_back(i);

  Rng rng(seed);
  std::vector<char> selected(entries.size(), 0);
  for (auto& [key, idx] : groups) {
    rng.shuffle(idx);
    double acc = 0.0;
    for (std::size_t i : idx) {
      if (acc >= target_secs) break;
      selected[i] = 1;
      acc += entries[i].duration();
    }
  }
  std::vector<SegmentAnnotation> out;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (selected[i]) out.push_back(entries[i]);
  return out;
}

}  // namespace dsr
