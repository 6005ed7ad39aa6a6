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

#ifndef TREEBIAS_TOY_LM_H_
#define TREEBIAS_TOY_LM_H_

#include <span>
#include <vector>

namespace treebias {

// Add-k smoothed piece bigram model, the count-based stand-in for the
// source and target LMs of biasing-driven discounting.
class BigramLm {
 public:
  // Pieces are [0, vocab_size); bos_id starts every sequence.
  BigramLm(int vocab_size, int bos_id, double add_k = 0.1);

  void AddSequence(std::span<const int> pieces);
  // P(. | prev) over the vocab_size pieces.
  std::vector<double> Distribution(int prev) const;
  double Prob(int prev, int next) const;

  int vocab_size() const { return vocab_size_; }

 private:
  int Row(int prev) const;

  int vocab_size_;
  int bos_id_;
  double add_k_;
  std::vector<double> counts_;
  std::vector<double> totals_;
};

}  // namespace treebias

#endif  // TREEBIAS_TOY_LM_H_
