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

#include "treebias/gnn.h"

#include <cmath>

#include "treebias/errors.h"

namespace treebias {

namespace {

struct VariantEntry {
  EncoderVariant variant;
  std::string_view name;
};

constexpr VariantEntry kVariants[] = {
    {EncoderVariant::kNone, "none"},
    {EncoderVariant::kTreeRnn, "tree_rnn"},
    {EncoderVariant::kGcn, "gcn"},
    {EncoderVariant::kGcnii, "gcnii"},
    {EncoderVariant::kSage, "sage"},
    {EncoderVariant::kCombineAddFixed, "combine_add_fixed"},
    {EncoderVariant::kCombineAddAttn, "combine_add_attn"},
    {EncoderVariant::kCombineBilinear, "combine_bilinear"},
};

bool UsesNorm(const EncoderConfig& cfg, int num_layers) {
  return cfg.residual_norm && num_layers > 1;
}

std::string SageName(const std::string& prefix, const char* family, int layer, bool tied) {
  return prefix + "." + family + (tied ? "" : "_" + std::to_string(layer));
}

// Post-norm residual: LayerNorm(act + input).
Var ResidualNorm(Tape& tape, ParamStore& params, const std::string& prefix, int layer,
                 const Var& act, const Var& input) {
  const std::string ln = prefix + ".ln" + std::to_string(layer);
  return ad::LayerNorm(ad::Add(act, input), tape.Param(params, ln + ".gain"),
                       tape.Param(params, ln + ".bias"));
}

Var InputProjection(Tape& tape, const PrefixTree& tree, const Var& table,
                    ParamStore& params, const std::string& prefix) {
  return ad::MatMulBT(NodeEmbeddings(tape, tree, table), tape.Param(params, prefix + ".in"));
}

void AddNorms(ParamStore& params, const std::string& prefix, int num_layers, int d) {
  for (int l = 0; l < num_layers; ++l) {
    const std::string ln = prefix + ".ln" + std::to_string(l);
    params.Add(ln + ".gain", Tensor(1, d, 1.0));
    params.Add(ln + ".bias", Tensor(1, d, 0.0));
  }
}

void InitGcnLike(ParamStore& params, const std::string& prefix, const EncoderConfig& cfg,
                 int num_layers, int d_emb, std::mt19937_64& rng) {
  params.Add(prefix + ".in", XavierUniform(cfg.dim, d_emb, rng));
  for (int l = 0; l < num_layers; ++l) {
    const std::string name = LayerParamName(prefix, l, num_layers, cfg.tied);
    if (!params.Contains(name)) params.Add(name, XavierUniform(cfg.dim, cfg.dim, rng));
  }
  if (UsesNorm(cfg, num_layers)) AddNorms(params, prefix, num_layers, cfg.dim);
}

void InitSage(ParamStore& params, const std::string& prefix, const EncoderConfig& cfg,
              int num_layers, int d_emb, std::mt19937_64& rng) {
  const int d = cfg.dim;
  params.Add(prefix + ".in", XavierUniform(d, d_emb, rng));
  for (int l = 0; l < num_layers; ++l) {
    const std::string w1 = SageName(prefix, "W1", l, cfg.tied);
    if (params.Contains(w1)) continue;
    params.Add(w1, XavierUniform(d, d, rng));
    params.Add(SageName(prefix, "b", l, cfg.tied), Tensor(1, d, 0.0));
    params.Add(SageName(prefix, "W2", l, cfg.tied), XavierUniform(d, 2 * d, rng));
  }
  if (UsesNorm(cfg, num_layers)) AddNorms(params, prefix, num_layers, d);
}

}  // namespace

std::string_view VariantName(EncoderVariant v) {
  for (const auto& e : kVariants) {
    if (e.variant == v) return e.name;
  }
  throw DomainError("unknown encoder variant");
}

EncoderVariant ParseVariant(std::string_view name) {
  for (const auto& e : kVariants) {
    if (e.name == name) return e.variant;
  }
  throw DomainError("unknown encoder variant '" + std::string(name) + "'");
}

double GcniiBeta(int layer) {
  if (layer < 1) throw DomainError("GCNII layers are numbered from 1");
  return std::log(1.0 / layer + 1.0);
}

std::string LayerParamName(const std::string& prefix, int layer, int num_layers, bool tied) {
  if (tied && layer < num_layers - 1) return prefix + ".W_shared";
  return prefix + ".W" + std::to_string(layer);
}

Var NodeEmbeddings(Tape& tape, const PrefixTree& tree, const Var& table) {
  (void)tape;
  const int root_row = table.rows() - 1;
  std::vector<int> rows(tree.num_nodes());
  for (int i = 0; i < tree.num_nodes(); ++i) {
    const int piece = tree.node(i).piece_id;
    if (piece >= root_row) throw DomainError("piece id outside the embedding table");
    rows[i] = piece < 0 ? root_row : piece;
  }
  return ad::GatherRows(table, std::move(rows));
}

Var EncodeTreeRnn(Tape& tape, const PrefixTree& tree, const Var& table,
                  ParamStore& params, const std::string& prefix) {
  const Var w1 = tape.Param(params, prefix + ".W1");
  const Var w2 = tape.Param(params, prefix + ".W2");
  const int root_row = table.rows() - 1;

  std::vector<std::vector<int>> levels(tree.depth() + 1);
  std::vector<int> slot(tree.num_nodes());
  for (int i = 0; i < tree.num_nodes(); ++i) {
    auto& level = levels[tree.node(i).depth];
    slot[i] = static_cast<int>(level.size());
    level.push_back(i);
  }

  // Leaves to root, one batched level at a time.
  std::vector<Var> encoded(levels.size());
  for (int d = tree.depth(); d >= 0; --d) {
    std::vector<int> rows;
    for (int n : levels[d]) {
      const int piece = tree.node(n).piece_id;
      rows.push_back(piece < 0 ? root_row : piece);
    }
    Var pre = ad::MatMulBT(ad::GatherRows(table, std::move(rows)), w1);
    if (d < tree.depth()) {
      std::vector<SparseMatrix::Triplet> links;
      for (int n : levels[d]) {
        for (const auto& [piece, child] : tree.node(n).children) {
          links.push_back({slot[n], slot[child], 1.0});
        }
      }
      auto sum = ad::MakeSparseOperator(SparseMatrix::FromTriplets(
          int(levels[d].size()), int(levels[d + 1].size()), std::move(links)));
      pre = ad::Add(pre, ad::MatMulBT(ad::SpMM(std::move(sum), encoded[d + 1]), w2));
    }
    encoded[d] = ad::Relu(pre);
  }

  std::vector<int> order(tree.num_nodes());
  int offset = 0;
  std::vector<int> level_offset(levels.size());
  for (size_t d = 0; d < levels.size(); ++d) {
    level_offset[d] = offset;
    offset += static_cast<int>(levels[d].size());
  }
  for (int i = 0; i < tree.num_nodes(); ++i) {
    order[i] = level_offset[tree.node(i).depth] + slot[i];
  }
  return ad::GatherRows(ad::ConcatRows(encoded), std::move(order));
}

Var EncodeGcn(Tape& tape, const PrefixTree& tree, const GraphMatrices& graph,
              const Var& table, ParamStore& params, const std::string& prefix,
              const EncoderConfig& cfg) {
  if (graph.p_hat.rows() != tree.num_nodes()) {
    throw DomainError("graph matrices do not match the tree");
  }
  auto p_hat = ad::MakeSparseOperator(graph.p_hat);
  Var h = InputProjection(tape, tree, table, params, prefix);
  for (int l = 0; l < cfg.layers; ++l) {
    const Var w = tape.Param(params, LayerParamName(prefix, l, cfg.layers, cfg.tied));
    if (w.rows() != h.cols()) throw DomainError("GCN layer width mismatch");
    Var core = ad::MatMul(ad::SpMM(p_hat, h), w);
    Var act = cfg.activation ? ad::Relu(core) : core;
    h = UsesNorm(cfg, cfg.layers) ? ResidualNorm(tape, params, prefix, l, act, h) : act;
  }
  return h;
}

Var EncodeGcnii(Tape& tape, const PrefixTree& tree, const GraphMatrices& graph,
                const Var& table, ParamStore& params, const std::string& prefix,
                const EncoderConfig& cfg) {
  if (graph.p_hat.rows() != tree.num_nodes()) {
    throw DomainError("graph matrices do not match the tree");
  }
  if (cfg.gcnii_alpha < 0.0 || cfg.gcnii_alpha > 1.0) {
    throw DomainError("GCNII alpha must lie in [0, 1]");
  }
  auto p_hat = ad::MakeSparseOperator(graph.p_hat);
  const Var h0 = InputProjection(tape, tree, table, params, prefix);
  const Var identity = tape.Constant(Tensor::Identity(cfg.dim));
  Var h = h0;
  for (int l = 1; l <= cfg.layers; ++l) {
    const double beta = GcniiBeta(l);
    const Var w = tape.Param(params, LayerParamName(prefix, l - 1, cfg.layers, cfg.tied));
    const Var w_beta = ad::Add(ad::Scale(identity, 1.0 - beta), ad::Scale(w, beta));
    const Var mixed = ad::Add(ad::Scale(ad::SpMM(p_hat, h), 1.0 - cfg.gcnii_alpha),
                              ad::Scale(h0, cfg.gcnii_alpha));
    Var core = ad::MatMul(mixed, w_beta);
    Var act = cfg.activation ? ad::Relu(core) : core;
    h = UsesNorm(cfg, cfg.layers) ? ResidualNorm(tape, params, prefix, l - 1, act, h) : act;
  }
  return h;
}

Var EncodeSage(Tape& tape, const PrefixTree& tree, const Var& table,
               ParamStore& params, const std::string& prefix, const EncoderConfig& cfg,
               int num_layers) {
  std::vector<std::vector<int>> children(tree.num_nodes());
  for (int i = 0; i < tree.num_nodes(); ++i) {
    for (const auto& [piece, child] : tree.node(i).children) children[i].push_back(child);
  }
  Var h = InputProjection(tape, tree, table, params, prefix);
  for (int l = 0; l < num_layers; ++l) {
    const Var w1 = tape.Param(params, SageName(prefix, "W1", l, cfg.tied));
    const Var b = tape.Param(params, SageName(prefix, "b", l, cfg.tied));
    const Var w2 = tape.Param(params, SageName(prefix, "W2", l, cfg.tied));
    const Var transformed = ad::Sigmoid(ad::AddRow(ad::MatMulBT(h, w1), b));
    const Var pooled = ad::SegmentMax(transformed, children);
    const Var both[] = {pooled, h};
    const Var act = ad::Sigmoid(ad::MatMulBT(ad::ConcatCols(both), w2));
    h = UsesNorm(cfg, num_layers) ? ResidualNorm(tape, params, prefix, l, act, h) : act;
  }
  return h;
}

Var Combine(Tape& tape, const Var& h_gcn, const Var& h_sage, ParamStore& params,
            const std::string& prefix, const EncoderConfig& cfg,
            std::optional<Var> query) {
  if (!h_gcn.value().SameShape(h_sage.value())) {
    throw DomainError("combined encodings must have the same shape");
  }
  auto u = [&](int i) { return tape.Param(params, prefix + ".U" + std::to_string(i)); };
  switch (cfg.variant) {
    case EncoderVariant::kCombineAddFixed: {
      if (cfg.alpha_sage < 0.0 || cfg.alpha_sage > 1.0) {
        throw DomainError("alpha_sage must lie in [0, 1]");
      }
      return ad::Add(ad::Scale(ad::MatMulBT(h_gcn, u(1)), 1.0 - cfg.alpha_sage),
                     ad::Scale(ad::MatMulBT(h_sage, u(2)), cfg.alpha_sage));
    }
    case EncoderVariant::kCombineAddAttn: {
      if (!query) throw DomainError("attentive combination needs a query");
      if (query->cols() != h_gcn.cols() || query->rows() != 1) {
        throw DomainError("query width does not match the encodings");
      }
      const Var scores[] = {ad::MatMulBT(h_gcn, *query), ad::MatMulBT(h_sage, *query)};
      const Var weights = ad::Softmax(ad::ConcatCols(scores));
      return ad::Add(ad::ScaleRows(ad::MatMulBT(h_gcn, u(1)), ad::Column(weights, 0)),
                     ad::ScaleRows(ad::MatMulBT(h_sage, u(2)), ad::Column(weights, 1)));
    }
    case EncoderVariant::kCombineBilinear: {
      const Var pooled = ad::MatMulBT(
          ad::Mul(ad::Tanh(ad::MatMulBT(h_gcn, u(1))), ad::Tanh(ad::MatMulBT(h_sage, u(2)))),
          u(3));
      const Var& second = cfg.literal_shortcut ? h_gcn : h_sage;
      return ad::Add(pooled,
                     ad::Add(ad::MatMulBT(h_gcn, u(4)), ad::MatMulBT(second, u(5))));
    }
    default:
      throw DomainError("Combine called for a single-encoder variant");
  }
}

TreeEncoder::TreeEncoder(EncoderConfig cfg, int embedding_dim)
    : cfg_(cfg), embedding_dim_(embedding_dim) {
  if (cfg_.dim <= 0 || embedding_dim_ <= 0) throw DomainError("encoder widths must be positive");
  if (cfg_.layers < 1 || cfg_.sage_layers < 1) throw DomainError("encoders need >= 1 layer");
}

int TreeEncoder::output_dim() const {
  return cfg_.variant == EncoderVariant::kNone ? embedding_dim_ : cfg_.dim;
}

void TreeEncoder::InitParams(ParamStore& params, std::mt19937_64& rng) const {
  const int d = cfg_.dim;
  switch (cfg_.variant) {
    case EncoderVariant::kNone:
      return;
    case EncoderVariant::kTreeRnn:
      params.Add("gnn.trnn.W1", XavierUniform(d, embedding_dim_, rng));
      params.Add("gnn.trnn.W2", XavierUniform(d, d, rng));
      return;
    case EncoderVariant::kGcn:
      InitGcnLike(params, "gnn.gcn", cfg_, cfg_.layers, embedding_dim_, rng);
      return;
    case EncoderVariant::kGcnii:
      InitGcnLike(params, "gnn.gcnii", cfg_, cfg_.layers, embedding_dim_, rng);
      return;
    case EncoderVariant::kSage:
      InitSage(params, "gnn.sage", cfg_, cfg_.layers, embedding_dim_, rng);
      return;
    default:
      break;
  }
  InitGcnLike(params, "gnn.gcn", cfg_, cfg_.layers, embedding_dim_, rng);
  InitSage(params, "gnn.sage", cfg_, cfg_.sage_layers, embedding_dim_, rng);
  const int count = cfg_.variant == EncoderVariant::kCombineBilinear ? 5 : 2;
  for (int i = 1; i <= count; ++i) {
    params.Add("gnn.comb.U" + std::to_string(i), XavierUniform(d, d, rng));
  }
}

TreeEncoding TreeEncoder::Encode(Tape& tape, const PrefixTree& tree, ParamStore& params) const {
  const Var table = tape.Param(params, kEmbeddingParam);
  if (table.cols() != embedding_dim_) throw DomainError("embedding width mismatch");
  TreeEncoding enc;
  switch (cfg_.variant) {
    case EncoderVariant::kNone:
      enc.nodes = NodeEmbeddings(tape, tree, table);
      return enc;
    case EncoderVariant::kTreeRnn:
      enc.nodes = EncodeTreeRnn(tape, tree, table, params, "gnn.trnn");
      return enc;
    case EncoderVariant::kGcn:
      enc.nodes = EncodeGcn(tape, tree, ChildAdjacency(tree), table, params, "gnn.gcn", cfg_);
      return enc;
    case EncoderVariant::kGcnii:
      enc.nodes =
          EncodeGcnii(tape, tree, ChildAdjacency(tree), table, params, "gnn.gcnii", cfg_);
      return enc;
    case EncoderVariant::kSage:
      enc.nodes = EncodeSage(tape, tree, table, params, "gnn.sage", cfg_, cfg_.layers);
      return enc;
    default:
      break;
  }
  enc.gcn = EncodeGcn(tape, tree, ChildAdjacency(tree), table, params, "gnn.gcn", cfg_);
  enc.sage = EncodeSage(tape, tree, table, params, "gnn.sage", cfg_, cfg_.sage_layers);
  if (!needs_query()) {
    enc.nodes = Combine(tape, enc.gcn, enc.sage, params, "gnn.comb", cfg_, std::nullopt);
  }
  return enc;
}

Var TreeEncoder::Rows(Tape& tape, const TreeEncoding& enc, const std::vector<int>& nodes,
                      ParamStore& params, std::optional<Var> query) const {
  if (!needs_query()) return ad::GatherRows(enc.nodes, nodes);
  return Combine(tape, ad::GatherRows(enc.gcn, nodes), ad::GatherRows(enc.sage, nodes),
                 params, "gnn.comb", cfg_, query);
}

}  // namespace treebias
