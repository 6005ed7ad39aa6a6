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

#ifndef TREEBIAS_GNN_H_
#define TREEBIAS_GNN_H_

#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "treebias/autodiff.h"
#include "treebias/trie.h"

namespace treebias {

// Name of the shared word-piece embedding table. Its last row is the
// learned root embedding; the rows before it are indexed by token id.
inline constexpr const char* kEmbeddingParam = "emb";

enum class EncoderVariant {
  kNone,  // plain piece embeddings, no lookahead
  kTreeRnn,
  kGcn,
  kGcnii,
  kSage,
  kCombineAddFixed,
  kCombineAddAttn,
  kCombineBilinear,
};

std::string_view VariantName(EncoderVariant v);
// Accepts the names produced by VariantName; throws DomainError otherwise.
EncoderVariant ParseVariant(std::string_view name);

struct EncoderConfig {
  EncoderVariant variant = EncoderVariant::kNone;
  // Layer count of GCN/GCNII/GraphSAGE, and of the GCN branch of a combination.
  int layers = 2;
  // Layer count of the GraphSAGE branch of a combination.
  int sage_layers = 3;
  int dim = 16;
  // GCN/GCNII share the first L-1 layer matrices; GraphSAGE shares W1, b
  // and W2 across all layers.
  bool tied = true;
  double gcnii_alpha = 0.1;
  // alpha_gcn = 1 - alpha_sage in the fixed additive combination.
  double alpha_sage = 0.2;
  // Test switches: drop the activation / the residual + layer norm.
  bool activation = true;
  bool residual_norm = true;
  // Bilinear shortcut as printed, U4 h_gcn + U5 h_gcn, instead of
  // U4 h_gcn + U5 h_sage.
  bool literal_shortcut = false;
};

// GCNII layer weight, ln(1/l + 1), for layers l = 1..L.
double GcniiBeta(int layer);

// Parameter name of GCN/GCNII layer l (0-based) under the tying rule.
std::string LayerParamName(const std::string& prefix, int layer, int num_layers, bool tied);

// Embedding rows for every node (root uses the table's last row).
Var NodeEmbeddings(Tape& tape, const PrefixTree& tree, const Var& table);

// Single encoders. Each returns an N x d matrix aligned with tree nodes.
Var EncodeTreeRnn(Tape& tape, const PrefixTree& tree, const Var& table,
                  ParamStore& params, const std::string& prefix);
Var EncodeGcn(Tape& tape, const PrefixTree& tree, const GraphMatrices& graph,
              const Var& table, ParamStore& params, const std::string& prefix,
              const EncoderConfig& cfg);
Var EncodeGcnii(Tape& tape, const PrefixTree& tree, const GraphMatrices& graph,
                const Var& table, ParamStore& params, const std::string& prefix,
                const EncoderConfig& cfg);
Var EncodeSage(Tape& tape, const PrefixTree& tree, const Var& table,
               ParamStore& params, const std::string& prefix, const EncoderConfig& cfg,
               int num_layers);

// Combines row-aligned GCN and GraphSAGE encodings. The attentive mode
// needs the query (1 x d) and throws DomainError without it.
Var Combine(Tape& tape, const Var& h_gcn, const Var& h_sage, ParamStore& params,
            const std::string& prefix, const EncoderConfig& cfg,
            std::optional<Var> query);

// Encoded prefix tree for one utterance. For the attentive combination the
// two branches are kept apart because the weights depend on the query.
struct TreeEncoding {
  Var nodes;
  Var gcn;
  Var sage;
};

// Owns the parameter layout of one encoder variant.
class TreeEncoder {
 public:
  TreeEncoder(EncoderConfig cfg, int embedding_dim);

  const EncoderConfig& config() const { return cfg_; }
  int output_dim() const;
  bool needs_query() const { return cfg_.variant == EncoderVariant::kCombineAddAttn; }

  // Adds this encoder's parameters (not the embedding table).
  void InitParams(ParamStore& params, std::mt19937_64& rng) const;

  TreeEncoding Encode(Tape& tape, const PrefixTree& tree, ParamStore& params) const;
  // Encodings of the listed nodes, k x output_dim().
  Var Rows(Tape& tape, const TreeEncoding& enc, const std::vector<int>& nodes,
           ParamStore& params, std::optional<Var> query) const;

 private:
  EncoderConfig cfg_;
  int embedding_dim_;
};

}  // namespace treebias

#endif  // TREEBIAS_GNN_H_
