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

#include "treebias/toy_lm.h"

#include "treebias/errors.h"

namespace treebias {

BigramLm::BigramLm(int vocab_size, int bos_id, double add_k)
    : vocab_size_(vocab_size), bos_id_(bos_id), add_k_(add_k) {
  if (vocab_size <= 0 || !(add_k > 0)) throw DomainError("invalid bigram LM settings");
  if (bos_id >= 0 && bos_id < vocab_size) throw DomainError("bos id collides with a piece");
  counts_.assign(static_cast<size_t>(vocab_size + 1) * vocab_size, 0.0);
  totals_.assign(vocab_size + 1, 0.0);
}

int BigramLm::Row(int prev) const {
  if (prev == bos_id_) return vocab_size_;
  if (prev < 0 || prev >= vocab_size_) throw DomainError("bigram context out of range");
  return prev;
}

void BigramLm::AddSequence(std::span<const int> pieces) {
  int prev = bos_id_;
  for (int p : pieces) {
    if (p < 0 || p >= vocab_size_) throw DomainError("bigram piece out of range");
    const int r = Row(prev);
    counts_[static_cast<size_t>(r) * vocab_size_ + p] += 1.0;
    totals_[r] += 1.0;
    prev = p;
  }
}

double BigramLm::Prob(int prev, int next) const {
  if (next < 0 || next >= vocab_size_) throw DomainError("bigram piece out of range");
  const int r = Row(prev);
  return (counts_[static_cast<size_t>(r) * vocab_size_ + next] + add_k_) /
         (totals_[r] + add_k_ * vocab_size_);
}

std::vector<double> BigramLm::Distribution(int prev) const {
  std::vector<double> out(vocab_size_);
  for (int y = 0; y < vocab_size_; ++y) out[y] = Prob(prev, y);
  return out;
}

}  // namespace treebias
