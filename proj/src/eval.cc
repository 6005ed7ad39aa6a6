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

#include "treebias/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "treebias/errors.h"

namespace treebias {

int Alignment::cost() const {
  int c = 0;
  for (const AlignedPair& p : ops) c += p.op != EditOp::kMatch;
  return c;
}

Alignment Align(std::span<const std::string> ref, std::span<const std::string> hyp) {
  const size_t n = ref.size();
  const size_t m = hyp.size();
  std::vector<int> d((n + 1) * (m + 1));
  auto at = [&](size_t i, size_t j) -> int& { return d[i * (m + 1) + j]; };
  for (size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<int>(i);
  for (size_t j = 0; j <= m; ++j) at(0, j) = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      const int diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }
  Alignment out;
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const int here = at(i, j);
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (same && at(i - 1, j - 1) == here) {
        out.ops.push_back({EditOp::kMatch, int(i - 1), int(j - 1)});
        --i, --j;
        continue;
      }
      if (!same && at(i - 1, j - 1) + 1 == here) {
        out.ops.push_back({EditOp::kSubstitute, int(i - 1), int(j - 1)});
        --i, --j;
        continue;
      }
    }
    if (i > 0 && at(i - 1, j) + 1 == here) {
      out.ops.push_back({EditOp::kDelete, int(i - 1), -1});
      --i;
      continue;
    }
    out.ops.push_back({EditOp::kInsert, -1, int(j - 1)});
    --j;
  }
  std::reverse(out.ops.begin(), out.ops.end());
  return out;
}

std::optional<double> ErrorCounts::rate() const {
  if (reference <= 0) return std::nullopt;
  return static_cast<double>(errors()) / static_cast<double>(reference);
}

ErrorCounts& ErrorCounts::operator+=(const ErrorCounts& o) {
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  reference += o.reference;
  return *this;
}

ErrorCounts CountErrors(std::span<const std::string> ref, std::span<const std::string>,
                        const Alignment& alignment) {
  ErrorCounts c;
  c.reference = static_cast<long>(ref.size());
  for (const AlignedPair& p : alignment.ops) {
    if (p.op == EditOp::kSubstitute) ++c.substitutions;
    if (p.op == EditOp::kDelete) ++c.deletions;
    if (p.op == EditOp::kInsert) ++c.insertions;
  }
  return c;
}

ErrorCounts CountListErrors(std::span<const std::string> ref, std::span<const std::string> hyp,
                            const Alignment& alignment,
                            const std::unordered_set<std::string>& list) {
  ErrorCounts c;
  for (const std::string& w : ref) c.reference += list.count(w) > 0;
  for (const AlignedPair& p : alignment.ops) {
    switch (p.op) {
      case EditOp::kMatch:
        break;
      case EditOp::kSubstitute:
        if (list.count(ref[p.ref])) {
          ++c.substitutions;
        } else if (list.count(hyp[p.hyp])) {
          ++c.insertions;
        }
        break;
      case EditOp::kDelete:
        if (list.count(ref[p.ref])) ++c.deletions;
        break;
      case EditOp::kInsert:
        if (list.count(hyp[p.hyp])) ++c.insertions;
        break;
    }
  }
  return c;
}

namespace {

nlohmann::json CountsJson(const ErrorCounts& c) {
  nlohmann::json j;
  j["substitutions"] = c.substitutions;
  j["deletions"] = c.deletions;
  j["insertions"] = c.insertions;
  j["errors"] = c.errors();
  j["reference"] = c.reference;
  const auto r = c.rate();
  j["rate"] = r ? nlohmann::json(*r) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

nlohmann::json MetricReport::ToJson() const {
  nlohmann::json j;
  j["utterances"] = utterances;
  j["wer"] = CountsJson(wer);
  j["r_wer"] = CountsJson(r_wer);
  j["oov_wer"] = CountsJson(oov_wer);
  j["substitution_attribution"] =
      "a substitution counts once: as a reference error when the reference word is listed, "
      "otherwise as an insertion when the hypothesis word is listed";
  nlohmann::json groups_json = nlohmann::json::array();
  for (const auto& [g, c] : groups) {
    groups_json.push_back({{"group", g},
                           {"wer", CountsJson(c.wer)},
                           {"r_wer", CountsJson(c.r_wer)},
                           {"oov_wer", CountsJson(c.oov_wer)}});
  }
  j["groups"] = groups_json;
  return j;
}

MetricReport Score(std::span<const ScoredUtterance> utts,
                   const std::unordered_set<std::string>& oov) {
  MetricReport report;
  for (const ScoredUtterance& u : utts) {
    const Alignment a = Align(u.ref, u.hyp);
    const std::unordered_set<std::string> list(u.biasing.begin(), u.biasing.end());
    std::unordered_set<std::string> oov_list;
    for (const std::string& w : list) {
      if (oov.count(w)) oov_list.insert(w);
    }
    GroupCounts c;
    c.wer = CountErrors(u.ref, u.hyp, a);
    c.r_wer = CountListErrors(u.ref, u.hyp, a, list);
    c.oov_wer = CountListErrors(u.ref, u.hyp, a, oov_list);
    report.wer += c.wer;
    report.r_wer += c.r_wer;
    report.oov_wer += c.oov_wer;
    GroupCounts& g = report.groups[u.group];
    g.wer += c.wer;
    g.r_wer += c.r_wer;
    g.oov_wer += c.oov_wer;
    report.per_utterance.push_back(c);
    ++report.utterances;
  }
  return report;
}

double BinomialUpperTail(int n, int wins) {
  if (n < 0 || wins < 0 || wins > n) throw DomainError("invalid binomial tail arguments");
  if (n <= 62) {
    // Exact integer binomials.
    std::vector<std::uint64_t> row(n + 1, 0);
    row[0] = 1;
    for (int i = 1; i <= n; ++i) {
      for (int k = i; k > 0; --k) row[k] += row[k - 1];
    }
    std::uint64_t sum = 0;
    for (int k = wins; k <= n; ++k) sum += row[k];
    return std::ldexp(static_cast<double>(sum), -n);
  }
  double total = 0.0;
  for (int k = wins; k <= n; ++k) {
    total += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) -
                      n * std::log(2.0));
  }
  return std::min(total, 1.0);
}

std::optional<double> SignTest(std::span<const std::pair<double, double>> groups) {
  if (groups.empty()) throw DomainError("sign test needs at least one group");
  int n = 0;
  int wins = 0;
  for (const auto& [a, b] : groups) {
    if (a == b) continue;
    ++n;
    wins += b < a;
  }
  if (n == 0) return std::nullopt;
  return BinomialUpperTail(n, wins);
}

std::vector<std::pair<double, double>> GroupPairs(const MetricReport& baseline,
                                                  const MetricReport& candidate) {
  std::vector<std::pair<double, double>> out;
  for (const auto& [g, a] : baseline.groups) {
    const auto it = candidate.groups.find(g);
    if (it == candidate.groups.end()) throw DomainError("reports cover different groups");
    const ErrorCounts& b = it->second.r_wer;
    if (a.r_wer.reference > 0 && b.reference > 0) {
      out.emplace_back(*a.r_wer.rate(), *b.rate());
    } else {
      out.emplace_back(static_cast<double>(a.r_wer.errors()), static_cast<double>(b.errors()));
    }
  }
  if (out.size() != candidate.groups.size()) throw DomainError("reports cover different groups");
  return out;
}

std::string PerUtteranceTsv(std::span<const ScoredUtterance> utts, const MetricReport& report) {
  if (utts.size() != report.per_utterance.size()) {
    throw DomainError("report does not match the utterances");
  }
  std::string out = "index\tgroup\tref\thyp\terrors\twords\tr_errors\tr_words\toov_errors\toov_words\n";
  auto join = [](const std::vector<std::string>& w) {
    std::string s;
    for (size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + w[i];
    return s;
  };
  for (size_t i = 0; i < utts.size(); ++i) {
    const GroupCounts& c = report.per_utterance[i];
    out += std::to_string(i) + '\t' + std::to_string(utts[i].group) + '\t' + join(utts[i].ref) +
           '\t' + join(utts[i].hyp) + '\t' + std::to_string(c.wer.errors()) + '\t' +
           std::to_string(c.wer.reference) + '\t' + std::to_string(c.r_wer.errors()) + '\t' +
           std::to_string(c.r_wer.reference) + '\t' + std::to_string(c.oov_wer.errors()) + '\t' +
           std::to_string(c.oov_wer.reference) + '\n';
  }
  return out;
}

}  // namespace treebias
