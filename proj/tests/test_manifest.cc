// tests/test_manifest.cc

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

#include <fstream>
#include <map>

#include "doctest.h"
#include "dsr/wav_io.h"
#include "testutil.h"

using namespace dsr;
using dsr_test::TempDir;

namespace {

struct SegSpec {
  std::string utt, spk;
  double start, end;
  std::string group = "g";
};

std::string make_session(const TempDir& tmp, int channels, double seconds,
                         const std::vector<SegSpec>& segs, int rate = 16000) {
  std::string json = "{ \"session_id\": \"S1\", \"channels\": [";
  for (int c = 0; c < channels; ++c) {
    std::string wav = tmp.path("ch" + std::to_string(c) + ".wav");
    dsr::Rng rng(100 + c);
    write_wav(wav, dsr_test::white_noise(rng, static_cast<std::size_t>(seconds * rate),
                                         rate, 0.1));
    json += (c ? ", " : "") + ("\"" + wav + "\"");
  }
  json += "], \"segments\": [";
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    json += (i ? ", " : "");
    json += "{\"utt_id\": \"" + s.utt + "\", \"speaker\": \"" + s.spk +
            "\", \"start\": " + std::to_string(s.start) +
            ", \"end\": " + std::to_string(s.end) + ", \"group\": \"" + s.group + "\"}";
  }
  json += "] }";
  std::string path = tmp.path("session.json");
  std::ofstream(path) << json;
  return path;
}

}  // namespace

TEST_CASE("load_session_manifest: minimal file parses") {
  TempDir tmp("mani");
  auto path = make_session(tmp, 1, 2.0, {{"u1", "spk1", 0.5, 1.5}});
  auto m = load_session_manifest(path);
  CHECK(m.session_id == "S1");
  CHECK(m.channel_paths.size() == 1);
  REQUIRE(m.segments.size() == 1);
  CHECK(m.segments[0].utt_id == "u1");
  CHECK(m.sample_rate == 16000);
  CHECK(m.num_frames == 32000);
}

TEST_CASE("load_session_manifest: end < start rejected naming the utt") {
  TempDir tmp("mani");
  auto path = make_session(tmp, 1, 2.0, {{"bad_utt", "spk1", 1.5, 0.5}});
  CHECK_THROWS_WITH_AS(load_session_manifest(path), doctest::Contains("bad_utt"),
                       std::runtime_error);
}

TEST_CASE("load_session_manifest: missing audio file") {
  TempDir tmp("mani");
  std::string path = tmp.path("m.json");
  std::ofstream(path) << R"({"session_id":"S","channels":["/no/such/file.wav"],"segments":[]})";
  CHECK_THROWS_WITH_AS(load_session_manifest(path), doctest::Contains("missing audio file"),
                       std::runtime_error);
}

TEST_CASE("load_session_manifest: segment past the recording rejected") {
  TempDir tmp("mani");
  auto path = make_session(tmp, 1, 2.0, {{"u1", "spk1", 0.5, 5.0}});
  CHECK_THROWS_WITH_AS(load_session_manifest(path), doctest::Contains("past the recording"),
                       std::runtime_error);
}

TEST_CASE("cut_segment_with_context: context 0 cuts exactly [start, end]") {
  TempDir tmp("mani");
  auto path = make_session(tmp, 2, 4.0, {{"u1", "spk1", 1.0, 2.5}});
  auto m = load_session_manifest(path);
  auto cut = cut_segment_with_context(m, "u1", 0.0);
  CHECK(cut.audio.num_samples() == 24000);  // 1.5 s at 16 kHz
  CHECK(cut.core.sample_begin == 0);
  CHECK(cut.core.sample_end == 24000);
  // audio content matches the raw file slice
  auto full = read_wav(m.channel_paths[0]);
  for (int i = 0; i < 100; ++i)
    CHECK(cut.audio.channels[0].samples[i] == full.channels[0].samples[16000 + i]);
}

TEST_CASE("cut_segment_with_context: left context clamps at the recording start") {
  TempDir tmp("mani");
  auto path = make_session(tmp, 1, 30.0, {{"u1", "spk1", 2.0, 3.0}});
  auto m = load_session_manifest(path);
  auto cut = cut_segment_with_context(m, "u1", 15.0);
  // left context truncated to 2 s, right context truncated to 27 s
  CHECK(cut.audio.num_samples() == (2000 + 1000 + 15000) * 16);
  CHECK(cut.core.sample_begin == 32000);
  CHECK(cut.core.sample_end == 48000);
}

TEST_CASE("cut_segment_with_context: length invariant after clamping") {
  TempDir tmp("mani");
  auto path = make_session(tmp, 1, 10.0, {{"u1", "spk1", 4.25, 5.75}});
  auto m = load_session_manifest(path);
  for (double ctx : {0.0, 0.5, 1.0, 3.0}) {
    auto cut = cut_segment_with_context(m, "u1", ctx);
    long expect = std::lround((5.75 + ctx > 10.0 ? 10.0 : 5.75 + ctx) * 16000) -
                  std::lround((4.25 - ctx < 0.0 ? 0.0 : 4.25 - ctx) * 16000);
    CHECK(static_cast<long>(cut.audio.num_samples()) == expect);
  }
}

TEST_CASE("cut_segment_with_context: unknown utt_id") {
  TempDir tmp("mani");
  auto path = make_session(tmp, 1, 2.0, {{"u1", "spk1", 0.5, 1.5}});
  auto m = load_session_manifest(path);
  CHECK_THROWS_WITH_AS(cut_segment_with_context(m, "nope", 1.0),
                       doctest::Contains("unknown utt_id"), std::runtime_error);
}

TEST_CASE("cut_segment_with_context: four-speaker session yields four rows") {
  TempDir tmp("mani");
  auto path = make_session(tmp, 1, 20.0,
                           {{"u1", "A", 5.0, 8.0},
                            {"u2", "B", 6.0, 7.0},
                            {"u3", "C", 1.0, 5.5},
                            {"u4", "D", 7.5, 12.0}});
  auto m = load_session_manifest(path);
  auto cut = cut_segment_with_context(m, "u1", 15.0);
  CHECK(cut.activity.num_speakers() == 4);
  CHECK(cut.activity.speakers[cut.activity.target_row] == "A");
}

TEST_CASE("cut_segment_with_context: fully-overlapping speaker active on every core frame") {
  TempDir tmp("mani");
  auto path = make_session(tmp, 1, 20.0,
                           {{"u1", "A", 5.0, 8.0}, {"u2", "B", 4.0, 9.0}});
  auto m = load_session_manifest(path);
  auto cut = cut_segment_with_context(m, "u1", 2.0);
  int row_b = cut.activity.speakers[0] == "B" ? 0 : 1;
  for (int t = cut.core.frame_begin; t < cut.core.frame_end; ++t) {
    CHECK(cut.activity.active(row_b, t));
    CHECK(cut.activity.active(cut.activity.target_row, t));
  }
}

TEST_CASE("cut_segment_with_context: rasterization round-trips within one hop") {
  TempDir tmp("mani");
  auto path = make_session(tmp, 1, 20.0,
                           {{"u1", "A", 3.0, 9.0}, {"u2", "B", 4.317, 6.881}});
  auto m = load_session_manifest(path);
  StftConfig cfg;
  auto cut = cut_segment_with_context(m, "u1", 2.0);
  int row_b = cut.activity.speakers[0] == "B" ? 0 : 1;
  int first = -1, last = -1;
  for (int t = 0; t < cut.activity.num_frames; ++t) {
    if (cut.activity.active(row_b, t)) {
      if (first < 0) first = t;
      last = t;
    }
  }
  REQUIRE(first >= 0);
  // B spans samples (relative to cut at 1.0 s) [53072, 94096)
  long b_begin = std::lround(4.317 * 16000) - 16000;
  long b_end = std::lround(6.881 * 16000) - 16000;
  CHECK(std::abs(first * cfg.hop - b_begin) <= cfg.hop);
  CHECK(std::abs((last + 1) * cfg.hop - b_end) <= cfg.hop);
}

TEST_CASE("ActivityGrid::without_inactive_rows keeps the target") {
  ActivityGrid g;
  g.speakers = {"A", "B", "C"};
  g.num_frames = 4;
  g.target_row = 1;
  g.activity = {1, 1, 0, 0,   // A
                0, 1, 1, 0,   // B (target)
                0, 0, 0, 0};  // C inactive
  auto pruned = g.without_inactive_rows();
  CHECK(pruned.num_speakers() == 2);
  CHECK(pruned.speakers[pruned.target_row] == "B");
  CHECK(pruned.active(0, 0));
  CHECK(pruned.active(1, 2));
}

TEST_CASE("subset_by_hours: group below target returned whole") {
  std::vector<SegmentAnnotation> entries;
  for (int i = 0; i < 50; ++i)
    entries.push_back({"u" + std::to_string(i), "s", 0.0, 3600.0, "small"});  // 50 h
  auto out = subset_by_hours(entries, 80.0, 1);
  CHECK(out.size() == 50);
}

TEST_CASE("subset_by_hours: per-group overshoot below one utterance") {
  std::vector<SegmentAnnotation> entries;
  dsr::Rng rng(4);
  const std::vector<std::string> groups = {"c6/ihm", "c6/mdm", "m6/ihm", "m6/mdm"};
  for (const auto& g : groups) {
    double total = 0.0;
    int i = 0;
    while (total < 100.0 * 3600.0) {  // 100 h per group
      double dur = 5.0 + 25.0 * rng.uniform();
      entries.push_back({g + "_u" + std::to_string(i++), "s", 0.0, dur, g});
      total += dur;
    }
  }
  auto out = subset_by_hours(entries, 80.0, 42);
  std::map<std::string, double> hours;
  std::map<std::string, double> max_dur;
  for (const auto& e : out) {
    hours[e.group_key] += e.duration() / 3600.0;
    max_dur[e.group_key] = std::max(max_dur[e.group_key], e.duration() / 3600.0);
  }
  for (const auto& g : groups) {
    CHECK(hours[g] >= 80.0);
    CHECK(hours[g] < 80.0 + max_dur[g]);
  }
}

TEST_CASE("subset_by_hours: deterministic for a fixed seed") {
  std::vector<SegmentAnnotation> entries;
  for (int i = 0; i < 2000; ++i)
    entries.push_back({"u" + std::to_string(i), "s", 0.0, 200.0 + i % 37, "g"});
  auto a = subset_by_hours(entries, 10.0, 7);
  auto b = subset_by_hours(entries, 10.0, 7);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].utt_id == b[i].utt_id);
  auto c = subset_by_hours(entries, 10.0, 8);
  bool same = a.size() == c.size();
  if (same)
    for (std::size_t i = 0; i < a.size(); ++i) same = same && a[i].utt_id == c[i].utt_id;
  CHECK_FALSE(same);
}
