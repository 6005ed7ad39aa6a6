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

#ifndef TREEBIAS_TRIE_H_
#define TREEBIAS_TRIE_H_

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "treebias/tensor.h"
#include "treebias/wordpiece.h"

namespace treebias {

struct TreeNode {
  int piece_id = -1;  // -1 for the root
  int parent = -1;
  int depth = 0;
  // (piece id, child index), sorted by piece id.
  std::vector<std::pair<int, int>> children;
  bool is_word_end = false;
  std::optional<int> word_index;
};

// Word-piece prefix tree over a biasing list. Node 0 is a synthetic root.
class PrefixTree {
 public:
  static constexpr int kRoot = 0;

  PrefixTree();
  // Duplicate words are merged; word indices refer to words().
  static PrefixTree Build(std::span<const TokenSeq> words);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(int i) const { return nodes_.at(i); }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int word_count() const { return static_cast<int>(words_.size()); }
  int depth() const { return depth_; }
  const std::vector<TokenSeq>& words() const { return words_; }

  std::optional<int> Child(int node, int piece_id) const;

 private:
  std::vector<TreeNode> nodes_;
  std::vector<TokenSeq> words_;
  int depth_ = 0;
};

struct TraversalState {
  int node = PrefixTree::kRoot;
  // Pieces consumed along the current in-tree path.
  std::vector<int> history;
  // Word completed by the most recent advance, if any.
  std::optional<int> completed_word;

  bool operator==(const TraversalState&) const = default;
};

struct ValidPiece {
  int piece_id;
  int node;
  bool operator==(const ValidPiece&) const = default;
};

// Children of the current node, in ascending piece id order.
std::vector<ValidPiece> ValidSet(const PrefixTree& tree,
                                 const TraversalState& state);

// Moves along the emitted piece. Completing a word or leaving the tree
// returns to the root; an off-tree piece is retried from the root.
TraversalState Advance(const PrefixTree& tree, const TraversalState& state,
                       int emitted);

// A_hat = A + I with child-directed edges only, its out-degree D_hat, and
// P_hat = D_hat^-1/2 A_hat D_hat^-1/2.
struct GraphMatrices {
  SparseMatrix a_hat;
  std::vector<double> degree;
  SparseMatrix p_hat;
};

GraphMatrices ChildAdjacency(const PrefixTree& tree);

// Debug dump: {"nodes": [...], "word_count": n, "depth": d}.
std::string TreeToJson(const PrefixTree& tree, const Vocab& vocab);

}  // namespace treebias

#endif  // TREEBIAS_TRIE_H_
