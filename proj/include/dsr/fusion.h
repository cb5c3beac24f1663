// include/dsr/fusion.h

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

#ifndef DSR_FUSION_H_
#define DSR_FUSION_H_

#include <map>
#include <string>
#include <vector>

namespace dsr {

// The empty string stands for the null word (epsilon) throughout.
inline const std::string kEpsilon;

struct NBestHypothesis {
  std::vector<std::string> tokens;
  double score = 0.0;  // log-domain unless the file says otherwise
};

struct NBestList {
  std::string utt_id;
  std::vector<NBestHypothesis> hypotheses;
};

// One slot of a confusion network: word (or epsilon) -> probability mass.
struct ConfusionSlot {
  std::map<std::string, double> mass;
  int pivot_pos = -1;  // index into the pivot hypothesis, -1 for inserted slots
};

struct ConfusionNetwork {
  std::vector<ConfusionSlot> slots;
  std::vector<std::string> pivot;  // the highest-posterior hypothesis
};

struct CtmRecord {
  std::string utt_id;
  int word_index = 0;
  std::string token;
  double confidence = 1.0;
};

struct ScoredToken {
  std::string token;
  double confidence = 1.0;
};

struct RoverConfig {
  double alpha = 0.8;      // frequency/confidence trade-off
  double null_conf = 0.4;  // confidence of the null word

  void validate() const;
};

struct WerReport {
  long substitutions = 0;
  long deletions = 0;
  long insertions = 0;
  long ref_words = 0;
  double wer = 0.0;

  long errors() const { return substitutions + deletions + insertions; }
};

// Softmax with temperature over the hypothesis scores; when the scores are
// already probabilities they are used directly (renormalized).
std::vector<double> posteriors_from_scores(const NBestList& nbest, double temperature,
                                           bool scores_are_probs = false);

// Pivot-based compaction: the highest-posterior hypothesis defines the
// slots, every other hypothesis is Levenshtein-aligned to it and deposits
// its posterior on the aligned word (or epsilon). Insertions open new
// slots whose previously accumulated mass goes to epsilon. Slot masses
// each sum to the total posterior mass.
ConfusionNetwork hystoc_confusion_network(const NBestList& nbest,
                                          const std::vector<double>& posteriors);

// Emits the pivot path with the slot confidence of each pivot word;
// inserted (epsilon-pivot) slots are skipped.
std::vector<CtmRecord> cn_to_ctm(const ConfusionNetwork& cn, const std::string& utt_id);

// Word-transition-network fusion with frequency + max-confidence voting.
// Purely textual alignment; time marks are ignored.
std::vector<ScoredToken> rover(const std::vector<std::vector<ScoredToken>>& systems,
                               const RoverConfig& cfg = RoverConfig{});

// Minimal-edit-distance word error rate with uniform costs. Among optimal
// alignments the one with the fewest insertions is counted, which makes
// wer(a, b) and wer(b, a) exchange insertions and deletions.
WerReport wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

// ---- file formats ----

// Lines `utt_id<TAB>score<TAB>token token ...`, grouped by utterance in
// order of first appearance.
std::vector<NBestList> read_nbest_file(const std::string& path);

// CTM: `utt_id channel start dur token [confidence]`.
std::vector<CtmRecord> read_ctm(const std::string& path);
void write_ctm(const std::string& path, const std::vector<CtmRecord>& records);

// TRN: `token token ... (utt_id)` per line.
std::vector<std::pair<std::string, std::vector<std::string>>> read_trn(
    const std::string& path);

// Groups CTM records into per-utterance token sequences (file order).
std::vector<std::pair<std::string, std::vector<ScoredToken>>> ctm_to_sequences(
    const std::vector<CtmRecord>& records);

}  // namespace dsr

#endif  // DSR_FUSION_H_
