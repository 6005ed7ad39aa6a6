// Copyright (c) 2026 The treebias Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TREEBIAS_EVAL_H_
#define TREEBIAS_EVAL_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"

namespace treebias {

enum class EditOp { kMatch, kSubstitute, kDelete, kInsert };

struct AlignedPair {
  EditOp op;
  // Index into ref / hyp, -1 when the side is empty.
  int ref;
  int hyp;
};

struct Alignment {
  std::vector<AlignedPair> ops;
  int cost() const;
};

// Minimal unit-cost alignment. The backtrace prefers match, then
// substitution, then deletion, then insertion.
Alignment Align(std::span<const std::string> ref, std::span<const std::string> hyp);

struct ErrorCounts {
  long substitutions = 0;
  long deletions = 0;
  long insertions = 0;
  // Reference tokens in scope.
  long reference = 0;

  long errors() const { return substitutions + deletions + insertions; }
  // errors / reference, or nullopt when nothing is in scope.
  std::optional<double> rate() const;
  ErrorCounts& operator+=(const ErrorCounts& o);
};

ErrorCounts CountErrors(std::span<const std::string> ref, std::span<const std::string> hyp,
                        const Alignment& alignment);

// Errors on list tokens. A deleted or substituted reference word counts
// when it is in the list; an inserted word counts when it is in the list;
// a substitution whose hypothesis word alone is in the list counts once as
// an insertion. The denominator is the reference words in the list.
ErrorCounts CountListErrors(std::span<const std::string> ref, std::span<const std::string> hyp,
                            const Alignment& alignment,
                            const std::unordered_set<std::string>& list);

struct ScoredUtterance {
  std::vector<std::string> ref;
  std::vector<std::string> hyp;
  std::vector<std::string> biasing;
  int group = 0;
};

struct GroupCounts {
  ErrorCounts wer;
  ErrorCounts r_wer;
  ErrorCounts oov_wer;
};

struct MetricReport {
  ErrorCounts wer;
  ErrorCounts r_wer;
  ErrorCounts oov_wer;
  long utterances = 0;
  std::map<int, GroupCounts> groups;
  std::vector<GroupCounts> per_utterance;

  nlohmann::json ToJson() const;
};

// OOV-WER is R-WER with each list cut down to the oov words.
MetricReport Score(std::span<const ScoredUtterance> utts,
                   const std::unordered_set<std::string>& oov);

// One-tailed sign test. Each pair is (baseline, candidate) and lower is
// better; ties are dropped. Returns nullopt when every group ties.
std::optional<double> SignTest(std::span<const std::pair<double, double>> groups);

// P(X >= wins) for X ~ Binomial(n, 1/2).
double BinomialUpperTail(int n, int wins);

// Per-group R-WER pairs of two reports over the same groups. A group whose
// denominator is zero is compared on raw error counts.
std::vector<std::pair<double, double>> GroupPairs(const MetricReport& baseline,
                                                  const MetricReport& candidate);

// Per-utterance TSV: index, group, ref, hyp, errors and denominators.
std::string PerUtteranceTsv(std::span<const ScoredUtterance> utts, const MetricReport& report);

}  // namespace treebias

#endif  // TREEBIAS_EVAL_H_
