// tests/test_cli.cc

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

#include <cstdlib>
#include <fstream>

#include "doctest.h"
#include "dsr/fusion.h"
#include "dsr/wav_io.h"
#include "sim_session.h"
#include "testutil.h"

#ifndef DSRKIT_BIN
#define DSRKIT_BIN "dsrkit"
#endif

using namespace dsr;
using dsr_test::TempDir;

namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(DSRKIT_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("cli: enhance exits 0 on success and 2 when a segment fails") {
  TempDir tmp("cli");
  dsr::Rng rng(31);
  auto sim = dsr_test::make_two_speaker_session(rng, tmp.dir(), "cli");
  CHECK(cli("enhance --manifest " + sim.manifest_path + " --out " + tmp.path("ok") +
            " --context-secs 1.0 --keep-fraction 1.0") == 0);
  CHECK(std::ifstream(tmp.path("ok") + "/cli/cli_utt.wav").good());
  CHECK(std::ifstream(tmp.path("ok") + "/report.jsonl").good());

  // a segment too short to fill the WPE history, with no context to save it
  std::string json;
  {
    std::ifstream in(sim.manifest_path);
    std::getline(in, json, '\0');
  }
  json.insert(json.rfind("] }"),
              ", {\"utt_id\": \"tiny\", \"speaker\": \"target\", "
              "\"start\": 9.5, \"end\": 9.55, \"group\": \"sim\"}");
  std::ofstream(sim.manifest_path) << json;
  CHECK(cli("enhance --manifest " + sim.manifest_path + " --out " + tmp.path("mixed") +
            " --context-secs 0.0 --keep-fraction 1.0") == 2);
  // the report is still written and the good segments still came out
  CHECK(std::ifstream(tmp.path("mixed") + "/report.jsonl").good());
  CHECK(std::ifstream(tmp.path("mixed") + "/cli/cli_utt.wav").good());
}

TEST_CASE("cli: unknown variant is a usage error") {
  TempDir tmp("cli");
  CHECK(cli("enhance --manifest nope.json --out " + tmp.path("o") + " --variant what") != 0);
}

TEST_CASE("cli: hystoc then rover round-trips through CTM files") {
  TempDir tmp("cli");
  {
    std::ofstream nb(tmp.path("a.nbest"));
    nb.precision(17);
    nb << "u1\t" << std::log(0.7) << "\tA B C\n";
    nb << "u1\t" << std::log(0.2) << "\tA B\n";
    nb << "u1\t" << std::log(0.1) << "\tA C\n";
  }
  REQUIRE(cli("fuse hystoc --nbest " + tmp.path("a.nbest") + " --temperature 1.0 --out " +
              tmp.path("a.ctm")) == 0);
  auto ctm = read_ctm(tmp.path("a.ctm"));
  REQUIRE(ctm.size() == 3);
  CHECK(ctm[1].token == "B");
  CHECK(ctm[1].confidence == doctest::Approx(0.9).epsilon(1e-9));

  REQUIRE(cli("fuse rover " + tmp.path("a.ctm") + " " + tmp.path("a.ctm") + " --out " +
              tmp.path("r.ctm")) == 0);
  auto fused = read_ctm(tmp.path("r.ctm"));
  REQUIRE(fused.size() == 3);
  CHECK(fused[0].token == "A");
  CHECK(fused[2].token == "C");
}

TEST_CASE("cli: score reports aggregate WER over TRN files") {
  TempDir tmp("cli");
  std::ofstream(tmp.path("ref.trn")) << "a b c (u1)\nx y (u2)\n";
  std::ofstream(tmp.path("hyp.trn")) << "a x c d (u1)\nx y (u2)\n";
  const std::string out = tmp.path("score.txt");
  const std::string cmd = std::string(DSRKIT_BIN) + " score --ref " + tmp.path("ref.trn") +
                          " --hyp " + tmp.path("hyp.trn") + " > " + out + " 2>/dev/null";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  std::ifstream in(out);
  std::string line;
  std::getline(in, line);
  CHECK(line.find("%WER 40.00 [ 2 / 5, 1 ins, 0 del, 1 sub ]") != std::string::npos);
}
