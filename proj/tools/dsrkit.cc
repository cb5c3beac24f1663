// tools/dsrkit.cc

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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dsr/augment.h"
#include "dsr/fusion.h"
#include "dsr/manifest.h"
#include "dsr/pipeline.h"
#include "dsr/resample.h"
#include "dsr/room_sim.h"
#include "dsr/wav_io.h"

namespace {

int run_enhance(const std::string& manifest_path, const std::string& out_dir,
                const std::string& variant, double context_secs, double keep_fraction,
                int taps, int workers, std::uint64_t seed) {
  dsr::PipelineConfig cfg;
  cfg.variant = dsr::PipelineConfig::parse_variant(variant);
  cfg.context_secs = context_secs;
  cfg.keep_fraction = keep_fraction;
  cfg.taps = taps;
  cfg.seed = seed;
  auto manifest = dsr::load_session_manifest(manifest_path);
  auto report = dsr::enhance_manifest(manifest, cfg, out_dir, workers);
  int ok = 0;
  for (const auto& seg : report.segments)
    if (seg.status == "ok") ++ok;
  std::fprintf(stderr, "enhance: %d/%zu segments ok, report at %s/report.jsonl\n", ok,
               report.segments.size(), out_dir.c_str());
  for (const auto& seg : report.segments)
    if (seg.status != "ok") std::fprintf(stderr, "enhance: failed %s\n", seg.error.c_str());
  return report.num_failed() == 0 ? 0 : 2;
}

int run_simulate_rir(int count, std::uint64_t seed, int fs, double len_ms,
                     const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  dsr::Rng rng(seed);
  const int rir_len = static_cast<int>(std::lround(len_ms / 1000.0 * fs));
  for (int i = 0; i < count; ++i) {
    dsr::RoomSpec room = dsr::sample_room(rng);
    auto rir = dsr::simulate_rir(room, fs, rir_len);
    char name[32];
    std::snprintf(name, sizeof(name), "rir_%05d.wav", i);
    dsr::write_wav(out_dir + "/" + name, rir, dsr::WavBitDepth::kFloat32);
  }
  std::fprintf(stderr, "simulate-rir: wrote %d files to %s\n", count, out_dir.c_str());
  return 0;
}

int run_augment_mix(const std::string& primary_path, const std::string& background_path,
                    double snr_low, double snr_high, double pad_secs, double codec_prob,
                    const std::string& codec_name, const std::string& codec_cmd,
                    std::uint64_t seed, const std::string& out_path) {
  auto primary = dsr::read_wav(primary_path).channels[0];
  auto background = dsr::read_wav(background_path).channels[0];
  if (background.sample_rate != primary.sample_rate)
    background = dsr::resample(background, primary.sample_rate);

  dsr::Rng rng(seed);
  dsr::RoomSpec room_p = dsr::sample_room(rng);
  dsr::RoomSpec room_b = dsr::sample_room(rng);  // background gets its own room draw
  const int rir_len = primary.sample_rate / 4;   // 250 ms
  auto rir_p = dsr::simulate_rir(room_p, primary.sample_rate, rir_len);
  auto rir_b = dsr::simulate_rir(room_b, primary.sample_rate, rir_len);

  dsr::MixConfig cfg;
  cfg.snr_low_db = snr_low;
  cfg.snr_high_db = snr_high;
  cfg.pad_secs = pad_secs;
  cfg.codec_prob = codec_prob;
  cfg.seed = rng.raw();
  cfg.codec_cmd = codec_cmd;
  auto mixed = dsr::mix_background_speaker(primary, background, rir_p, rir_b, cfg);

  dsr::Codec codec = dsr::Codec::kG711Ulaw;
  if (codec_name == "g711_alaw") codec = dsr::Codec::kG711Alaw;
  if (codec_name == "external") codec = dsr::Codec::kExternal;
  auto coded = dsr::apply_codec(mixed.mixture, codec, cfg);
  if (!coded.warning.empty()) std::fprintf(stderr, "augment mix: %s\n", coded.warning.c_str());

  auto report = dsr::write_wav(out_path, dsr::peak_normalize(coded.audio),
                               dsr::WavBitDepth::kPcm16);
  if (report.clipped_samples > 0)
    std::fprintf(stderr, "augment mix: %zu samples clipped\n", report.clipped_samples);
  std::fprintf(stderr, "augment mix: snr_db=%.3f offset=%zu codec_applied=%d -> %s\n",
               mixed.snr_db, mixed.offset, coded.applied ? 1 : 0, out_path.c_str());
  return 0;
}

int run_fuse_hystoc(const std::string& nbest_path, double temperature, bool scores_are_probs,
                    const std::string& out_path) {
  auto lists = dsr::read_nbest_file(nbest_path);
  std::vector<dsr::CtmRecord> records;
  for (const auto& nbest : lists) {
    auto posteriors = dsr::posteriors_from_scores(nbest, temperature, scores_are_probs);
    auto cn = dsr::hystoc_confusion_network(nbest, posteriors);
    auto ctm = dsr::cn_to_ctm(cn, nbest.utt_id);
    records.insert(records.end(), ctm.begin(), ctm.end());
  }
  dsr::write_ctm(out_path, records);
  std::fprintf(stderr, "fuse hystoc: %zu utterances -> %s\n", lists.size(), out_path.c_str());
  return 0;
}

int run_fuse_rover(const std::vector<std::string>& ctm_paths, double alpha, double null_conf,
                   const std::string& out_path) {
  dsr::RoverConfig cfg;
  cfg.alpha = alpha;
  cfg.null_conf = null_conf;

  std::vector<std::vector<std::pair<std::string, std::vector<dsr::ScoredToken>>>> systems;
  for (const auto& path : ctm_paths)
    systems.push_back(dsr::ctm_to_sequences(dsr::read_ctm(path)));

  // utterances in order of first appearance across systems
  std::vector<std::string> utt_order;
  for (const auto& sys : systems)
    for (const auto& [utt, tokens] : sys)
      if (std::find(utt_order.begin(), utt_order.end(), utt) == utt_order.end())
        utt_order.push_back(utt);

  std::vector<dsr::CtmRecord> fused_records;
  for (const auto& utt : utt_order) {
    std::vector<std::vector<dsr::ScoredToken>> inputs;
    for (const auto& sys : systems) {
      auto it = std::find_if(sys.begin(), sys.end(),
                             [&](const auto& p) { return p.first == utt; });
      inputs.push_back(it == sys.end() ? std::vector<dsr::ScoredToken>{} : it->second);
    }
    auto fused = dsr::rover(inputs, cfg);
    for (std::size_t i = 0; i < fused.size(); ++i)
      fused_records.push_back(
          {utt, static_cast<int>(i), fused[i].token, fused[i].confidence});
  }
  dsr::write_ctm(out_path, fused_records);
  std::fprintf(stderr, "fuse rover: %zu systems, %zu utterances -> %s\n", systems.size(),
               utt_order.size(), out_path.c_str());
  return 0;
}

int run_score(const std::string& ref_path, const std::string& hyp_path, bool per_utt) {
  auto ref = dsr::read_trn(ref_path);
  auto hyp = dsr::read_trn(hyp_path);
  dsr::WerReport total;
  for (const auto& [utt, ref_tokens] : ref) {
    auto it = std::find_if(hyp.begin(), hyp.end(),
                           [&, utt = utt](const auto& p) { return p.first == utt; });
    std::vector<std::string> hyp_tokens;
    if (it == hyp.end())
      std::fprintf(stderr, "score: no hypothesis for %s, scoring as empty\n", utt.c_str());
    else
      hyp_tokens = it->second;
    auto r = dsr::wer(ref_tokens, hyp_tokens);
    if (per_utt)
      std::printf("%s: %%WER %.2f [ %ld / %ld, %ld ins, %ld del, %ld sub ]\n", utt.c_str(),
                  100.0 * r.wer, r.errors(), r.ref_words, r.insertions, r.deletions,
                  r.substitutions);
    total.substitutions += r.substitutions;
    total.deletions += r.deletions;
    total.insertions += r.insertions;
    total.ref_words += r.ref_words;
  }
  total.wer = static_cast<double>(total.errors()) / std::max<long>(total.ref_words, 1);
  std::printf("%%WER %.2f [ %ld / %ld, %ld ins, %ld del, %ld sub ]\n", 100.0 * total.wer,
              total.errors(), total.ref_words, total.insertions, total.deletions,
              total.substitutions);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dsrkit: distant-speech enhancement, augmentation, and fusion toolkit"};
  app.require_subcommand(1);

  // enhance
  std::string manifest_path, out_dir, variant = "gss";
  double context_secs = 15.0, keep_fraction = 0.8;
  int taps = 5, workers = 1;
  std::uint64_t seed = 0;
  auto* enhance = app.add_subcommand("enhance", "Enhance every segment of a session manifest");
  enhance->add_option("--manifest", manifest_path, "session manifest JSON")->required();
  enhance->add_option("--out", out_dir, "output directory")->required();
  enhance->add_option("--variant", variant, "gss | gss-postfilter | cwmwf-cban");
  enhance->add_option("--context-secs", context_secs, "context on each side, seconds");
  enhance->add_option("--keep-fraction", keep_fraction, "fraction of channels to keep");
  enhance->add_option("--taps", taps, "convolutional filter taps (cwmwf-cban)");
  enhance->add_option("--workers", workers, "parallel segment workers");
  enhance->add_option("--seed", seed, "random seed");

  // simulate-rir
  int rir_count = 1, rir_fs = 16000;
  double rir_len_ms = 500.0;
  std::uint64_t rir_seed = 0;
  std::string rir_out;
  auto* simrir = app.add_subcommand("simulate-rir", "Sample rooms and write image-method RIRs");
  simrir->add_option("--count", rir_count, "number of RIRs");
  simrir->add_option("--seed", rir_seed, "random seed");
  simrir->add_option("--fs", rir_fs, "sample rate");
  simrir->add_option("--len-ms", rir_len_ms, "RIR length in milliseconds");
  simrir->add_option("--out", rir_out, "output directory")->required();

  // augment mix
  auto* augment = app.add_subcommand("augment", "Data augmentation");
  augment->require_subcommand(1);
  std::string mix_primary, mix_background, mix_out, mix_codec = "g711_ulaw", mix_codec_cmd;
  double mix_snr_low = 5.0, mix_snr_high = 12.0, mix_pad = 4.0, mix_codec_prob = 1.0 / 7.0;
  std::uint64_t mix_seed = 0;
  auto* mix = augment->add_subcommand("mix", "Insert a reverberated background speaker");
  mix->add_option("--primary", mix_primary, "primary WAV")->required();
  mix->add_option("--background", mix_background, "background-speaker WAV")->required();
  mix->add_option("--snr-low", mix_snr_low, "lowest SNR in dB");
  mix->add_option("--snr-high", mix_snr_high, "highest SNR in dB");
  mix->add_option("--pad-secs", mix_pad, "silence padding around the background");
  mix->add_option("--codec-prob", mix_codec_prob, "probability of applying the codec");
  mix->add_option("--codec", mix_codec, "g711_ulaw | g711_alaw | external");
  mix->add_option("--codec-cmd", mix_codec_cmd, "external codec command (WAV on stdio)");
  mix->add_option("--seed", mix_seed, "random seed");
  mix->add_option("--out", mix_out, "output WAV")->required();

  // fuse hystoc / rover
  auto* fuse = app.add_subcommand("fuse", "Hypothesis fusion");
  fuse->require_subcommand(1);
  std::string hystoc_nbest, hystoc_out;
  double hystoc_temperature = 1.0;
  bool scores_are_probs = false;
  auto* hystoc = fuse->add_subcommand("hystoc", "Compact N-best lists into a confidence CTM");
  hystoc->add_option("--nbest", hystoc_nbest, "N-best file (utt<TAB>score<TAB>tokens)")
      ->required();
  hystoc->add_option("--temperature", hystoc_temperature, "softmax temperature");
  hystoc->add_flag("--scores-are-probs", scores_are_probs,
                   "scores are probabilities, not log-probabilities");
  hystoc->add_option("--out", hystoc_out, "output CTM")->required();

  std::vector<std::string> rover_ctms;
  std::string rover_out;
  double rover_alpha = 0.8, rover_null_conf = 0.4;
  auto* rover_cmd = fuse->add_subcommand("rover", "Fuse CTMs by word voting");
  rover_cmd->add_option("--alpha", rover_alpha, "frequency/confidence trade-off");
  rover_cmd->add_option("--null-conf", rover_null_conf, "null word confidence");
  rover_cmd->add_option("ctms", rover_ctms, "input CTM files")->required()->expected(-1);
  rover_cmd->add_option("--out", rover_out, "output CTM")->required();

  // score
  std::string score_ref, score_hyp;
  bool score_per_utt = false;
  auto* score = app.add_subcommand("score", "Word error rate between TRN files");
  score->add_option("--ref", score_ref, "reference TRN")->required();
  score->add_option("--hyp", score_hyp, "hypothesis TRN")->required();
  score->add_flag("--per-utt", score_per_utt, "print per-utterance WER lines");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*enhance)
      return run_enhance(manifest_path, out_dir, variant, context_secs, keep_fraction, taps,
                         workers, seed);
    if (*simrir) return run_simulate_rir(rir_count, rir_seed, rir_fs, rir_len_ms, rir_out);
    if (*mix)
      return run_augment_mix(mix_primary, mix_background, mix_snr_low, mix_snr_high, mix_pad,
                             mix_codec_prob, mix_codec, mix_codec_cmd, mix_seed, mix_out);
    if (*hystoc)
      return run_fuse_hystoc(hystoc_nbest, hystoc_temperature, scores_are_probs, hystoc_out);
    if (*rover_cmd) return run_fuse_rover(rover_ctms, rover_alpha, rover_null_conf, rover_out);
    if (*score) return run_score(score_ref, score_hyp, score_per_utt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "dsrkit: %s\n", e.what());
    return 1;
  }
  return 0;
}
