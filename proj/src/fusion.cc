// src/fusion.cc

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

#include "dsr/fusion.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dsr {

namespace {

enum class EditOp { kMatch, kSub, kDel, kIns };

// Levenshtein alignment of hyp against ref with unit costs. Ties prefer
// match, then substitution, then deletion, then insertion. "Deletion"
// consumes a ref position without a hyp word; "insertion" is a hyp word
// between ref positions.
std::vector<EditOp> align(const std::vector<std::string>& ref,
                          const std::vector<std::string>& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::vector<int>> cost(n + 1, std::vector<int>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) cost[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) cost[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      const int diag = cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cost[i][j] = std::min({diag, cost[i - 1][j] + 1, cost[i][j - 1] + 1});
    }
  std::vector<EditOp> ops;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        cost[i][j] == cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      ops.push_back(ref[i - 1] == hyp[j - 1] ? EditOp::kMatch : EditOp::kSub);
      --i;
      --j;
    } else if (i > 0 && cost[i][j] == cost[i - 1][j] + 1) {
      ops.push_back(EditOp::kDel);
      --i;
    } else {
      ops.push_back(EditOp::kIns);
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

}  // namespace

void RoverConfig::validate() const {
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("RoverConfig: alpha must be in [0, 1]");
  if (null_conf < 0.0 || null_conf > 1.0)
    throw std::invalid_argument("RoverConfig: null_conf must be in [0, 1]");
}

std::vector<double> posteriors_from_scores(const NBestList& nbest, double temperature,
                                           bool scores_are_probs) {
  if (nbest.hypotheses.empty())
    throw std::invalid_argument("posteriors_from_scores: empty hypothesis set");
  if (temperature <= 0.0)
    throw std::invalid_argument("posteriors_from_scores: temperature must be > 0");
  std::vector<double> p(nbest.hypotheses.size());
  if (scores_are_probs) {
    double total = 0.0;
    for (std::size_t h = 0; h < p.size(); ++h) {
      if (nbest.hypotheses[h].score < 0.0)
        throw std::invalid_argument("posteriors_from_scores: negative probability");
      p[h] = nbest.hypotheses[h].score;
      total += p[h];
    }
    if (total <= 0.0)
      throw std::invalid_argument("posteriors_from_scores: probabilities sum to zero");
    for (auto& v : p) v /= total;
    return p;
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& h : nbest.hypotheses) best = std::max(best, h.score / temperature);
  double total = 0.0;
  for (std::size_t h = 0; h < p.size(); ++h) {
    p[h] = std::exp(nbest.hypotheses[h].score / temperature - best);
    total += p[h];
  }
  for (auto& v : p) v /= total;
  return p;
}

ConfusionNetwork hystoc_confusion_network(const NBestList& nbest,
                                          const std::vector<double>& posteriors) {
  if (nbest.hypotheses.empty())
    throw std::invalid_argument("hystoc_confusion_network: empty hypothesis set");
  if (posteriors.size() != nbest.hypotheses.size())
    throw std::invalid_argument("hystoc_confusion_network: posterior count mismatch");
  double total_mass = 0.0;
  for (double v : posteriors) total_mass += v;
  if (total_mass <= 0.0)
    throw std::invalid_argument("hystoc_confusion_network: zero posterior mass");

  std::size_t pivot_idx = 0;
  for (std::size_t h = 1; h < posteriors.size(); ++h)
    if (posteriors[h] > posteriors[pivot_idx]) pivot_idx = h;

  ConfusionNetwork cn;
  cn.pivot = nbest.hypotheses[pivot_idx].tokens;
  const std::size_t pivot_len = cn.pivot.size();

  cn.slots.resize(pivot_len);
  for (std::size_t i = 0; i < pivot_len; ++i) {
    cn.slots[i].pivot_pos = static_cast<int>(i);
    cn.slots[i].mass[cn.pivot[i]] = posteriors[pivot_idx] / total_mass;
  }
  // inserted slots, grouped by the pivot gap they sit in (gap g is before
  // pivot position g); each entry indexes into cn.slots
  std::vector<std::vector<std::size_t>> gap_slots(pivot_len + 1);

  double merged_mass = posteriors[pivot_idx] / total_mass;
  for (std::size_t h = 0; h < nbest.hypotheses.size(); ++h) {
    if (h == pivot_idx) continue;
    const double p = posteriors[h] / total_mass;
    const auto& tokens = nbest.hypotheses[h].tokens;
    const auto ops = align(cn.pivot, tokens);

    // replay the alignment: word-or-epsilon per pivot slot, plus the
    // insertion lists per gap
    std::vector<std::string> aligned(pivot_len, kEpsilon);
    std::vector<std::vector<std::string>> inserted(pivot_len + 1);
    std::size_t i = 0, j = 0;
    for (EditOp op : ops) {
      switch (op) {
        case EditOp::kMatch:
        case EditOp::kSub:
          aligned[i] = tokens[j];
          ++i;
          ++j;
          break;
        case EditOp::kDel:
          ++i;
          break;
        case EditOp::kIns:
          inserted[i].push_back(tokens[j]);
          ++j;
          break;
      }
    }

    for (std::size_t g = 0; g <= pivot_len; ++g) {
      // fill existing inserted slots of this gap in order, then open new ones
      for (std::size_t k = 0; k < std::max(gap_slots[g].size(), inserted[g].size()); ++k) {
        if (k >= gap_slots[g].size()) {
          ConfusionSlot fresh;
          fresh.pivot_pos = -1;
          fresh.mass[kEpsilon] = merged_mass;  // everyone merged so far missed it
          // insert after the previous slot of this gap, or before pivot slot g
          std::size_t at = k > 0 ? gap_slots[g][k - 1] + 1
                                 : (g < pivot_len ? [&] {
                                     // position of pivot slot g in cn.slots
                                     for (std::size_t s = 0; s < cn.slots.size(); ++s)
                                       if (cn.slots[s].pivot_pos == static_cast<int>(g))
                                         return s;
                                     return cn.slots.size();
                                   }()
                                                  : cn.slots.size());
          cn.slots.insert(cn.slots.begin() + at, fresh);
          for (auto& gap : gap_slots)
            for (auto& idx : gap)
              if (idx >= at) ++idx;
          gap_slots[g].push_back(at);
        }
        auto& slot = cn.slots[gap_slots[g][k]];
        if (k < inserted[g].size())
          slot.mass[inserted[g][k]] += p;
        else
          slot.mass[kEpsilon] += p;
      }
      if (g < pivot_len) {
        for (auto& s : cn.slots)
          if (s.pivot_pos == static_cast<int>(g)) s.mass[aligned[g]] += p;
      }
    }
    merged_mass += p;
  }
  return cn;
}

std::vector<CtmRecord> cn_to_ctm(const ConfusionNetwork& cn, const std::string& utt_id) {
  std::vector<CtmRecord> out;
  int index = 0;
  for (const auto& slot : cn.slots) {
    if (slot.pivot_pos < 0) continue;  // inserted slot, epsilon on the pivot path
    const std::string& word = cn.pivot[slot.pivot_pos];
    CtmRecord rec;
    rec.utt_id = utt_id;
    rec.word_index = index++;
    rec.token = word;
    auto it = slot.mass.find(word);
    rec.confidence = it == slot.mass.end() ? 0.0 : it->second;
    out.push_back(std::move(rec));
  }
  return out;
}

namespace {

struct NetEntry {
  int count = 0;
  double max_conf = 0.0;
  int first_system = std::numeric_limits<int>::max();
};

struct NetSlot {
  std::map<std::string, NetEntry> words;
  int eps_count = 0;

  bool contains(const std::string& w) const { return words.find(w) != words.end(); }
  void add(const std::string& w, double conf, int system) {
    auto& e = words[w];
    e.count += 1;
    e.max_conf = std::max(e.max_conf, conf);
    e.first_system = std::min(e.first_system, system);
  }
};

}  // namespace

std::vector<ScoredToken> rover(const std::vector<std::vector<ScoredToken>>& systems,
                               const RoverConfig& cfg) {
  cfg.validate();
  if (systems.empty()) throw std::invalid_argument("rover: no input systems");

  std::vector<NetSlot> network;
  for (const auto& tok : systems[0]) {
    NetSlot slot;
    slot.add(tok.token, tok.confidence, 0);
    network.push_back(std::move(slot));
  }

  for (std::size_t sys = 1; sys < systems.size(); ++sys) {
    const auto& tokens = systems[sys];
    const std::size_t n = network.size(), m = tokens.size();
    // DP against the growing network: a slot matches a word already in it
    std::vector<std::vector<int>> cost(n + 1, std::vector<int>(m + 1));
    for (std::size_t i = 0; i <= n; ++i) cost[i][0] = static_cast<int>(i);
    for (std::size_t j = 0; j <= m; ++j) cost[0][j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 1; j <= m; ++j) {
        const int diag =
            cost[i - 1][j - 1] + (network[i - 1].contains(tokens[j - 1].token) ? 0 : 1);
        cost[i][j] = std::min({diag, cost[i - 1][j] + 1, cost[i][j - 1] + 1});
      }
    // backtrace, tie preference match > substitution > deletion > insertion
    std::vector<std::pair<EditOp, std::size_t>> ops;  // op + token index when used
    std::size_t i = n, j = m;
    while (i > 0 || j > 0) {
      const bool can_diag =
          i > 0 && j > 0 &&
          cost[i][j] ==
              cost[i - 1][j - 1] + (network[i - 1].contains(tokens[j - 1].token) ? 0 : 1);
      if (can_diag) {
        ops.emplace_back(network[i - 1].contains(tokens[j - 1].token) ? EditOp::kMatch
                                                                      : EditOp::kSub,
                         j - 1);
        --i;
        --j;
      } else if (i > 0 && cost[i][j] == cost[i - 1][j] + 1) {
        ops.emplace_back(EditOp::kDel, 0);
        --i;
      } else {
        ops.emplace_back(EditOp::kIns, j - 1);
        --j;
      }
    }
    std::reverse(ops.begin(), ops.end());

    std::vector<NetSlot> merged;
    std::size_t slot_idx = 0;
    for (const auto& [op, tok_idx] : ops) {
      switch (op) {
        case EditOp::kMatch:
        case EditOp::kSub: {
          NetSlot slot = network[slot_idx++];
          slot.add(tokens[tok_idx].token, tokens[tok_idx].confidence,
                   static_cast<int>(sys));
          merged.push_back(std::move(slot));
          break;
        }
        case EditOp::kDel: {
          NetSlot slot = network[slot_idx++];
          slot.eps_count += 1;
          merged.push_back(std::move(slot));
          break;
        }
        case EditOp::kIns: {
          NetSlot slot;
          slot.eps_count = static_cast<int>(sys);  // every earlier system missed it
          slot.add(tokens[tok_idx].token, tokens[tok_idx].confidence,
                   static_cast<int>(sys));
          merged.push_back(std::move(slot));
          break;
        }
      }
    }
    network = std::move(merged);
  }

  // frequency + maximum-confidence voting per slot
  const double num_systems = static_cast<double>(systems.size());
  std::vector<ScoredToken> out;
  for (const auto& slot : network) {
    std::string best_word = kEpsilon;
    double best_score = cfg.alpha * slot.eps_count / num_systems +
                        (1.0 - cfg.alpha) * cfg.null_conf;
    double best_conf = cfg.null_conf;
    int best_system = std::numeric_limits<int>::max();
    for (const auto& [word, entry] : slot.words) {
      const double score =
          cfg.alpha * entry.count / num_systems + (1.0 - cfg.alpha) * entry.max_conf;
      // ties: a real word beats epsilon, then the earliest system wins
      const bool better =
          score > best_score ||
          (score == best_score &&
           (best_word == kEpsilon || entry.first_system < best_system));
      if (better) {
        best_word = word;
        best_score = score;
        best_conf = entry.max_conf;
        best_system = entry.first_system;
      }
    }
    if (best_word != kEpsilon) out.push_back({best_word, best_conf});
  }
  return out;
}

WerReport wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  // lexicographic DP on (edit cost, insertions); minimizing insertions at
  // equal cost fixes the S/D/I breakdown symmetrically
  struct Cell {
    int cost;
    int ins;
  };
  std::vector<std::vector<Cell>> dp(n + 1, std::vector<Cell>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) dp[i][0] = {static_cast<int>(i), 0};
  for (std::size_t j = 0; j <= m; ++j) dp[0][j] = {static_cast<int>(j), static_cast<int>(j)};
  auto better = [](Cell a, Cell b) {
    return a.cost < b.cost || (a.cost == b.cost && a.ins < b.ins);
  };
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      Cell best = {dp[i - 1][j - 1].cost + (ref[i - 1] == hyp[j - 1] ? 0 : 1),
                   dp[i - 1][j - 1].ins};
      Cell del = {dp[i - 1][j].cost + 1, dp[i - 1][j].ins};
      Cell ins = {dp[i][j - 1].cost + 1, dp[i][j - 1].ins + 1};
      if (better(del, best)) best = del;
      if (better(ins, best)) best = ins;
      dp[i][j] = best;
    }
  WerReport report;
  report.ref_words = static_cast<long>(n);
  const Cell final_cell = dp[n][m];
  report.insertions = final_cell.ins;
  report.deletions = final_cell.ins + static_cast<long>(n) - static_cast<long>(m);
  report.substitutions = final_cell.cost - report.insertions - report.deletions;
  report.wer = static_cast<double>(final_cell.cost) / std::max<long>(n, 1);
  return report;
}

std::vector<NBestList> read_nbest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("nbest: cannot open " + path);
  std::vector<NBestList> lists;
  std::map<std::string, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos
                                                : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos)
      throw std::runtime_error("nbest: line " + std::to_string(line_no) +
                               ": expected utt_id<TAB>score<TAB>tokens");
    const std::string utt = line.substr(0, tab1);
    NBestHypothesis hyp;
    try {
      hyp.score = std::stod(line.substr(tab1 + 1, tab2 - tab1 - 1));
    } catch (const std::exception&) {
      throw std::runtime_error("nbest: line " + std::to_string(line_no) +
                               ": score is not a number");
    }
    hyp.tokens = split_tokens(line.substr(tab2 + 1));
    if (hyp.tokens.empty())
      throw std::runtime_error("nbest: line " + std::to_string(line_no) +
                               ": empty hypothesis");
    auto it = index.find(utt);
    if (it == index.end()) {
      index.emplace(utt, lists.size());
      lists.push_back({utt, {}});
      it = index.find(utt);
    }
    lists[it->second].hypotheses.push_back(std::move(hyp));
  }
  return lists;
}

std::vector<CtmRecord> read_ctm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ctm: cannot open " + path);
  std::vector<CtmRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == ';') continue;  // sclite-style comments
    std::istringstream ls(line);
    std::string utt, channel, token;
    double start = 0.0, dur = 0.0, conf = 1.0;
    if (!(ls >> utt >> channel >> start >> dur >> token))
      throw std::runtime_error("ctm: line " + std::to_string(line_no) + ": malformed");
    ls >> conf;
    CtmRecord rec;
    rec.utt_id = utt;
    rec.word_index = static_cast<int>(std::lround(start));
    rec.token = token;
    rec.confidence = conf;
    records.push_back(std::move(rec));
  }
  return records;
}

void write_ctm(const std::string& path, const std::vector<CtmRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("ctm: cannot write " + path);
  out.precision(17);  // confidences survive a parse round-trip
  for (const auto& r : records)
    out << r.utt_id << " 1 " << r.word_index << " 1 " << r.token << " " << r.confidence
        << "\n";
  if (!out) throw std::runtime_error("ctm: write failed for " + path);
}

std::vector<std::pair<std::string, std::vector<std::string>>> read_trn(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("trn: cannot open " + path);
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto open = line.rfind('(');
    const auto close = line.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
      throw std::runtime_error("trn: line " + std::to_string(line_no) +
                               ": missing (utt_id)");
    out.emplace_back(line.substr(open + 1, close - open - 1),
                     split_tokens(line.substr(0, open)));
  }
  return out;
}

std::vector<std::pair<std::string, std::vector<ScoredToken>>> ctm_to_sequences(
    const std::vector<CtmRecord>& records) {
  std::vector<std::pair<std::string, std::vector<ScoredToken>>> out;
  std::map<std::string, std::size_t> index;
  for (const auto& r : records) {
    auto it = index.find(r.utt_id);
    if (it == index.end()) {
      index.emplace(r.utt_id, out.size());
      out.push_back({r.utt_id, {}});
      it = index.find(r.utt_id);
    }
    out[it->second].second.push_back({r.token, r.confidence});
  }
  return out;
}

}  // namespace dsr
