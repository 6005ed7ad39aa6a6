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

#include "treebias/trie.h"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "treebias/errors.h"

namespace treebias {

PrefixTree::PrefixTree() { nodes_.emplace_back(); }

std::optional<int> PrefixTree::Child(int node, int piece_id) const {
  const auto& ch = nodes_.at(node).children;
  auto it = std::lower_bound(
      ch.begin(), ch.end(), piece_id,
      [](const std::pair<int, int>& c, int p) { return c.first < p; });
  if (it == ch.end() || it->first != piece_id) return std::nullopt;
  return it->second;
}

PrefixTree PrefixTree::Build(std::span<const TokenSeq> words) {
  PrefixTree tree;
  for (const auto& w : words) {
    if (w.pieces.empty()) throw DomainError("biasing word without pieces");
    int cur = kRoot;
    for (int piece : w.pieces) {
      if (auto child = tree.Child(cur, piece)) {
        cur = *child;
        continue;
      }
      const int idx = tree.num_nodes();
      TreeNode n;
      n.piece_id = piece;
      n.parent = cur;
      n.depth = tree.nodes_[cur].depth + 1;
      tree.nodes_.push_back(std::move(n));
      auto& ch = tree.nodes_[cur].children;
      ch.insert(std::upper_bound(ch.begin(), ch.end(), std::make_pair(piece, idx)),
                {piece, idx});
      tree.depth_ = std::max(tree.depth_, tree.nodes_[idx].depth);
      cur = idx;
    }
    auto& end = tree.nodes_[cur];
    if (end.is_word_end) continue;  // duplicate
    end.is_word_end = true;
    end.word_index = tree.word_count();
    tree.words_.push_back(w);
  }
  return tree;
}

std::vector<ValidPiece> ValidSet(const PrefixTree& tree,
                                 const TraversalState& state) {
  std::vector<ValidPiece> out;
  for (const auto& [piece, node] : tree.node(state.node).children) {
    out.push_back({piece, node});
  }
  return out;
}

TraversalState Advance(const PrefixTree& tree, const TraversalState& state,
                       int emitted) {
  auto step_from = [&](int node, std::vector<int> history) -> std::optional<TraversalState> {
    auto child = tree.Child(node, emitted);
    if (!child) return std::nullopt;
    TraversalState next;
    const auto& n = tree.node(*child);
    if (n.is_word_end) {
      next.completed_word = n.word_index;
      return next;
    }
    history.push_back(emitted);
    next.node = *child;
    next.history = std::move(history);
    return next;
  };
  if (auto next = step_from(state.node, state.history)) return *next;
  if (state.node != PrefixTree::kRoot) {
    if (auto next = step_from(PrefixTree::kRoot, {})) return *next;
  }
  return TraversalState{};
}

GraphMatrices ChildAdjacency(const PrefixTree& tree) {
  const int n = tree.num_nodes();
  GraphMatrices g;
  std::vector<SparseMatrix::Triplet> entries;
  g.degree.resize(n);
  for (int i = 0; i < n; ++i) {
    entries.push_back({i, i, 1.0});
    for (const auto& [piece, child] : tree.node(i).children) {
      entries.push_back({i, child, 1.0});
    }
    g.degree[i] = 1.0 + static_cast<double>(tree.node(i).children.size());
  }
  g.a_hat = SparseMatrix::FromTriplets(n, n, entries);
  for (auto& e : entries) {
    e.value = 1.0 / (std::sqrt(g.degree[e.row]) * std::sqrt(g.degree[e.col]));
  }
  g.p_hat = SparseMatrix::FromTriplets(n, n, entries);
  return g;
}

std::string TreeToJson(const PrefixTree& tree, const Vocab& vocab) {
  nlohmann::json nodes = nlohmann::json::array();
  for (int i = 0; i < tree.num_nodes(); ++i) {
    const auto& n = tree.node(i);
    nlohmann::json j;
    j["id"] = i;
    j["piece"] = n.piece_id < 0 ? nlohmann::json(nullptr)
                                : nlohmann::json(vocab.piece(n.piece_id));
    j["parent"] = n.parent;
    j["depth"] = n.depth;
    nlohmann::json children = nlohmann::json::array();
    for (const auto& [piece, child] : n.children) children.push_back(child);
    j["children"] = children;
    j["word_end"] = n.is_word_end;
    if (n.word_index) j["word"] = tree.words()[*n.word_index].word;
    nodes.push_back(std::move(j));
  }
  nlohmann::json out;
  out["nodes"] = std::move(nodes);
  out["word_count"] = tree.word_count();
  out["depth"] = tree.depth();
  return out.dump(2);
}

}  // namespace treebias
