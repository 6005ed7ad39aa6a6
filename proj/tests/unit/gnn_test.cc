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

#include <cmath>

#include "doctest.h"
#include "test_util.h"
#include "treebias/errors.h"
#include "treebias/gnn.h"

namespace treebias {
namespace {

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Tree whose words are single pieces 0..k-1 below the root.
PrefixTree Star(int k) {
  std::vector<TokenSeq> words;
  for (int i = 0; i < k; ++i) words.push_back({"s" + std::to_string(i), {i}});
  return PrefixTree::Build(words);
}

Tensor Encode(const TreeEncoder& enc, const PrefixTree& tree, ParamStore& params) {
  Tape tape(false);
  return enc.Encode(tape, tree, params).nodes.value();
}

TEST_CASE("variant names round-trip") {
  for (auto v : {EncoderVariant::kNone, EncoderVariant::kTreeRnn, EncoderVariant::kGcn,
                 EncoderVariant::kGcnii, EncoderVariant::kSage, EncoderVariant::kCombineAddFixed,
                 EncoderVariant::kCombineAddAttn, EncoderVariant::kCombineBilinear}) {
    CHECK(ParseVariant(VariantName(v)) == v);
  }
  CHECK_THROWS_AS(ParseVariant("gat"), DomainError);
}

TEST_CASE("tree-RNN examples") {
  ParamStore params;
  params.Add("t.W1", Tensor::Identity(2));
  params.Add("t.W2", Tensor::Identity(2));
  {
    Tape tape;
    const Var table = tape.Constant(Tensor::Row({-1, 2}));
    CHECK(EncodeTreeRnn(tape, PrefixTree(), table, params, "t").value() == Tensor::Row({0, 2}));
  }
  Tape tape;
  const Var table = tape.Constant(Tensor(3, 2, std::vector<double>{0, 2, 1, 1, 1, 0}));
  const Tensor h = EncodeTreeRnn(tape, Star(2), table, params, "t").value();
  CHECK(h(0, 0) == 2.0);
  CHECK(h(0, 1) == 3.0);
}

TEST_CASE("GCN examples") {
  EncoderConfig cfg;
  cfg.layers = 1;
  cfg.dim = 1;
  cfg.activation = false;
  cfg.residual_norm = false;
  ParamStore params;
  params.Add("g.in", Tensor::Identity(1));
  params.Add("g.W0", Tensor::Identity(1));
  {
    Tape tape;
    const PrefixTree root;
    const Var table = tape.Constant(Tensor::Row({0.7}));
    CHECK(EncodeGcn(tape, root, ChildAdjacency(root), table, params, "g", cfg).value() ==
          Tensor::Row({0.7}));
  }
  Tape tape;
  const PrefixTree two = Star(1);
  // Row 0 is piece 0 (the leaf); the last row is the root.
  const Var table = tape.Constant(Tensor(2, 1, std::vector<double>{1, 0}));
  const Tensor h = EncodeGcn(tape, two, ChildAdjacency(two), table, params, "g", cfg).value();
  CHECK(h(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(h(1, 0) == 1.0);
}

TEST_CASE("GCNII examples") {
  CHECK(GcniiBeta(1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(GcniiBeta(1) == doctest::Approx(0.6931).epsilon(1e-4));
  CHECK_THROWS_AS(GcniiBeta(0), DomainError);

  std::mt19937_64 rng(2);
  const PrefixTree tree = testing::RandomTree(rng, 6, 4, 5);
  const GraphMatrices g = ChildAdjacency(tree);
  EncoderConfig cfg;
  cfg.layers = 3;
  cfg.dim = 4;
  cfg.tied = false;
  cfg.residual_norm = false;
  ParamStore params;
  params.Add("g.in", Gaussian(4, 4, 1.0, rng));
  for (int l = 0; l < 3; ++l) params.Add("g.W" + std::to_string(l), Tensor::Identity(4));
  Tape tape;
  const Var table = tape.Constant(Gaussian(6, 4, 1.0, rng));
  const Tensor h0 = ad::MatMulBT(NodeEmbeddings(tape, tree, table), tape.Param(params, "g.in")).value();

  // alpha = 1 and W = I: every layer is relu(H0), so the output is relu(H0).
  cfg.gcnii_alpha = 1.0;
  const Tensor h = EncodeGcnii(tape, tree, g, table, params, "g", cfg).value();
  for (size_t i = 0; i < h.size(); ++i) CHECK(h[i] == doctest::Approx(std::max(0.0, h0[i])));

  // W = I and linear: each layer is (1 - a) P H + a H0 exactly.
  cfg.gcnii_alpha = 0.3;
  cfg.activation = false;
  const Tensor lin = EncodeGcnii(tape, tree, g, table, params, "g", cfg).value();
  const Tensor p = g.p_hat.ToDense();
  Tensor ref = h0;
  for (int l = 0; l < 3; ++l) {
    Tensor next(ref.rows(), ref.cols());
    for (int i = 0; i < ref.rows(); ++i) {
      for (int c = 0; c < ref.cols(); ++c) {
        double s = 0;
        for (int j = 0; j < ref.rows(); ++j) s += p(i, j) * ref(j, c);
        next(i, c) = 0.7 * s + 0.3 * h0(i, c);
      }
    }
    ref = next;
  }
  for (size_t i = 0; i < lin.size(); ++i) CHECK(lin[i] == doctest::Approx(ref[i]).epsilon(1e-12));
}

TEST_CASE("GraphSAGE layer matches a brute-force evaluation on a star") {
  std::mt19937_64 rng(3);
  const int d = 3;
  EncoderConfig cfg;
  cfg.dim = d;
  cfg.residual_norm = false;
  ParamStore params;
  params.Add("s.in", Tensor::Identity(d));
  params.Add("s.W1", Gaussian(d, d, 1.0, rng));
  params.Add("s.b", Gaussian(1, d, 1.0, rng));
  params.Add("s.W2", Gaussian(d, 2 * d, 1.0, rng));
  const Tensor emb = Gaussian(3, d, 1.0, rng);  // pieces 0, 1 and the root
  Tape tape;
  const Tensor h = EncodeSage(tape, Star(2), tape.Constant(emb), params, "s", cfg, 1).value();

  const Tensor& w1 = params.value("s.W1");
  const Tensor& b = params.value("s.b");
  const Tensor& w2 = params.value("s.W2");
  auto transform = [&](int row) {
    std::vector<double> out(d);
    for (int i = 0; i < d; ++i) {
      double s = b[i];
      for (int k = 0; k < d; ++k) s += w1(i, k) * emb(row, k);
      out[i] = Sigmoid(s);
    }
    return out;
  };
  auto layer = [&](const std::vector<double>& pooled, int row) {
    std::vector<double> out(d);
    for (int i = 0; i < d; ++i) {
      double s = 0;
      for (int k = 0; k < d; ++k) s += w2(i, k) * pooled[k] + w2(i, d + k) * emb(row, k);
      out[i] = Sigmoid(s);
    }
    return out;
  };
  std::vector<double> pooled(d);
  const auto t0 = transform(0), t1 = transform(1);
  for (int i = 0; i < d; ++i) pooled[i] = std::max(t0[i], t1[i]);
  const auto root = layer(pooled, 2);
  for (int i = 0; i < d; ++i) CHECK(h(0, i) == doctest::Approx(root[i]).epsilon(1e-14));
  // Leaves pool nothing.
  const auto leaf = layer(std::vector<double>(d, 0.0), 0);
  const int leaf0 = *Star(2).Child(PrefixTree::kRoot, 0);
  for (int i = 0; i < d; ++i) CHECK(h(leaf0, i) == doctest::Approx(leaf[i]).epsilon(1e-14));

  // Single child: the pooled vector is that child's transform.
  Tensor emb1(2, d);
  for (int c = 0; c < d; ++c) {
    emb1(0, c) = emb(0, c);
    emb1(1, c) = emb(2, c);
  }
  const Tensor h1 = EncodeSage(tape, Star(1), tape.Constant(emb1), params, "s", cfg, 1).value();
  const auto single = layer(t0, 2);
  for (int i = 0; i < d; ++i) CHECK(h1(0, i) == doctest::Approx(single[i]).epsilon(1e-14));
}

TEST_CASE("GraphSAGE is invariant to child order") {
  std::mt19937_64 rng(4);
  const int d = 4;
  EncoderConfig cfg;
  cfg.variant = EncoderVariant::kSage;
  cfg.dim = d;
  cfg.layers = 2;
  TreeEncoder enc(cfg, d);
  ParamStore params;
  params.Add(kEmbeddingParam, Gaussian(5, d, 1.0, rng));  // 4 pieces + root
  enc.InitParams(params, rng);
  const std::vector<TokenSeq> words = {{"a", {0, 1}}, {"b", {0, 2}}, {"c", {0, 3}}};
  const Tensor h = Encode(enc, PrefixTree::Build(words), params);

  // Swap the embeddings of pieces 1 and 3 and relabel: children of node 0
  // now appear in a different order but the multiset of subtrees is equal.
  ParamStore swapped = params;
  Tensor& e = swapped.value(kEmbeddingParam);
  for (int c = 0; c < d; ++c) std::swap(e(1, c), e(3, c));
  const std::vector<TokenSeq> relabeled = {{"a", {0, 3}}, {"b", {0, 2}}, {"c", {0, 1}}};
  const Tensor h2 = Encode(enc, PrefixTree::Build(relabeled), swapped);
  for (int c = 0; c < d; ++c) {
    CHECK(h(0, c) == doctest::Approx(h2(0, c)).epsilon(1e-15));
    CHECK(h(1, c) == doctest::Approx(h2(1, c)).epsilon(1e-15));
  }
}

TEST_CASE("combiner examples") {
  std::mt19937_64 rng(5);
  const int d = 3;
  const Tensor hg = Gaussian(4, d, 1.0, rng), hs = Gaussian(4, d, 1.0, rng);
  ParamStore params;
  for (int i = 1; i <= 5; ++i) params.Add("c.U" + std::to_string(i), Gaussian(d, d, 1.0, rng));
  auto apply = [](const Tensor& u, const Tensor& h, int r) {
    std::vector<double> out(u.rows());
    for (int i = 0; i < u.rows(); ++i) {
      for (int k = 0; k < u.cols(); ++k) out[i] += u(i, k) * h(r, k);
    }
    return out;
  };

  EncoderConfig cfg;
  cfg.dim = d;
  cfg.variant = EncoderVariant::kCombineAddAttn;
  {
    Tape tape;
    const Var q = tape.Constant(Gaussian(1, d, 1.0, rng));
    const Tensor out = Combine(tape, tape.Constant(hg), tape.Constant(hg), params, "c", cfg, q).value();
    for (int r = 0; r < 4; ++r) {
      const auto a = apply(params.value("c.U1"), hg, r), b = apply(params.value("c.U2"), hg, r);
      for (int i = 0; i < d; ++i) CHECK(out(r, i) == doctest::Approx(0.5 * a[i] + 0.5 * b[i]));
    }
    CHECK_THROWS_AS(Combine(tape, tape.Constant(hg), tape.Constant(hs), params, "c", cfg,
                            std::nullopt),
                    DomainError);
  }

  cfg.variant = EncoderVariant::kCombineAddFixed;
  cfg.alpha_sage = 0.0;
  ParamStore ident = params;
  ident.value("c.U1") = Tensor::Identity(d);
  {
    Tape tape;
    CHECK(Combine(tape, tape.Constant(hg), tape.Constant(hs), ident, "c", cfg, std::nullopt)
              .value() == hg);
  }

  cfg.variant = EncoderVariant::kCombineBilinear;
  ParamStore zero = params;
  zero.value("c.U1") = Tensor(d, d, 0.0);
  for (bool literal : {false, true}) {
    cfg.literal_shortcut = literal;
    Tape tape;
    const Tensor out =
        Combine(tape, tape.Constant(hg), tape.Constant(hs), zero, "c", cfg, std::nullopt).value();
    for (int r = 0; r < 4; ++r) {
      const auto a = apply(zero.value("c.U4"), hg, r);
      const auto b = apply(zero.value("c.U5"), literal ? hg : hs, r);
      for (int i = 0; i < d; ++i) CHECK(out(r, i) == doctest::Approx(a[i] + b[i]).epsilon(1e-14));
    }
  }
}

// Nodes on a chain root -> n1 -> ... -> n_depth.
PrefixTree Chain(int depth) {
  TokenSeq w{"chain", {}};
  for (int i = 0; i < depth; ++i) w.pieces.push_back(i);
  return PrefixTree::Build(std::vector<TokenSeq>{w});
}

// Stacked sigmoids shrink a deep perturbation geometrically, so the
// sensitivity half of this check uses wide encoders with enlarged weights.
void WidenWeights(ParamStore& params, double gain) {
  for (const auto& name : params.Names()) {
    if (name.find(".W") == std::string::npos) continue;
    for (double& x : params.value(name).data()) x *= gain;
  }
}

TEST_CASE("encodings only look down the tree, up to L hops") {
  const int depth = 8, d = 64;
  const PrefixTree chain = Chain(depth);
  for (auto variant : {EncoderVariant::kGcn, EncoderVariant::kGcnii, EncoderVariant::kSage}) {
    for (int layers : {1, 2, 3}) {
      CAPTURE(VariantName(variant));
      CAPTURE(layers);
      std::mt19937_64 rng(layers);
      EncoderConfig cfg;
      cfg.variant = variant;
      cfg.layers = layers;
      cfg.dim = d;
      TreeEncoder enc(cfg, d);
      ParamStore params;
      params.Add(kEmbeddingParam, Gaussian(depth + 1, d, 1.0, rng));
      enc.InitParams(params, rng);
      WidenWeights(params, 4.0);
      const Tensor base = Encode(enc, chain, params);
      // Node k on the chain has piece k - 1 and sits k hops below the root.
      for (int k = 1; k <= depth; ++k) {
        ParamStore bumped = params;
        for (int c = 0; c < d; ++c) bumped.value(kEmbeddingParam)(k - 1, c) += 1e-3;
        const Tensor h = Encode(enc, chain, bumped);
        for (int n = 0; n <= depth; ++n) {
          double diff = 0;
          for (int c = 0; c < d; ++c) diff = std::max(diff, std::abs(h(n, c) - base(n, c)));
          const int hops = k - n;
          if (hops < 0 || hops > layers) {
            CHECK(diff == 0.0);
          } else {
            CHECK(diff > 1e-9);
          }
        }
      }
    }
  }
}

TEST_CASE("tree-RNN root depends on every descendant") {
  const int depth = 8, d = 4;
  std::mt19937_64 rng(8);
  EncoderConfig cfg;
  cfg.variant = EncoderVariant::kTreeRnn;
  cfg.dim = d;
  TreeEncoder enc(cfg, d);
  ParamStore params;
  params.Add(kEmbeddingParam, Gaussian(depth + 1, d, 1.0, rng));
  enc.InitParams(params, rng);
  // Keep every unit active so perturbations propagate.
  params.value("gnn.trnn.W2") = Tensor::Identity(d);
  params.value("gnn.trnn.W1") = Tensor::Identity(d);
  for (size_t i = 0; i < params.value(kEmbeddingParam).size(); ++i) {
    params.value(kEmbeddingParam)[i] = std::abs(params.value(kEmbeddingParam)[i]) + 0.1;
  }
  const PrefixTree chain = Chain(depth);
  const Tensor base = Encode(enc, chain, params);
  for (int k = 1; k <= depth; ++k) {
    ParamStore bumped = params;
    bumped.value(kEmbeddingParam)(k - 1, 0) += 1e-3;
    const Tensor h = Encode(enc, chain, bumped);
    CHECK(std::abs(h(0, 0) - base(0, 0)) > 1e-9);
  }
}

TEST_CASE("encoders pass grad_check end to end") {
  std::mt19937_64 rng(10);
  const PrefixTree tree = testing::RandomTree(rng, 5, 4, 4);
  REQUIRE(tree.num_nodes() <= 30);
  for (auto variant : {EncoderVariant::kTreeRnn, EncoderVariant::kGcn, EncoderVariant::kGcnii,
                       EncoderVariant::kSage, EncoderVariant::kCombineAddFixed,
                       EncoderVariant::kCombineAddAttn, EncoderVariant::kCombineBilinear}) {
    CAPTURE(VariantName(variant));
    EncoderConfig cfg;
    cfg.variant = variant;
    cfg.dim = 3;
    cfg.layers = 2;
    cfg.sage_layers = 2;
    TreeEncoder enc(cfg, 3);
    ParamStore params;
    params.Add(kEmbeddingParam, Gaussian(5, 3, 1.0, rng));
    enc.InitParams(params, rng);
    const Tensor q = Gaussian(1, 3, 1.0, rng);
    std::vector<int> all(tree.num_nodes());
    for (int i = 0; i < tree.num_nodes(); ++i) all[i] = i;
    const GradCheckResult r = GradCheck(
        [&](Tape& t, ParamStore& p) {
          const TreeEncoding e = enc.Encode(t, tree, p);
          const Var rows = enc.Rows(t, e, all, p, t.Constant(q));
          return ad::Sum(ad::Tanh(rows));
        },
        params, 1e-5);
    CHECK(r.max_rel_error < 1e-4);
  }
}

TEST_CASE("tied layers stay identical after an SGD step; untied ones diverge") {
  std::mt19937_64 rng(12);
  const PrefixTree tree = testing::RandomTree(rng, 6, 4, 4);
  EncoderConfig cfg;
  cfg.variant = EncoderVariant::kGcn;
  cfg.dim = 3;
  cfg.layers = 3;
  for (bool tied : {true, false}) {
    cfg.tied = tied;
    TreeEncoder enc(cfg, 3);
    ParamStore params;
    params.Add(kEmbeddingParam, Gaussian(5, 3, 1.0, rng));
    enc.InitParams(params, rng);
    if (!tied) params.value("gnn.gcn.W1") = params.value("gnn.gcn.W0");
    Tape tape;
    tape.Backward(ad::Sum(ad::Tanh(enc.Encode(tape, tree, params).nodes)));
    params.SgdStep(0.1);
    if (tied) {
      CHECK(LayerParamName("gnn.gcn", 0, 3, true) == LayerParamName("gnn.gcn", 1, 3, true));
      CHECK(LayerParamName("gnn.gcn", 2, 3, true) != LayerParamName("gnn.gcn", 1, 3, true));
      CHECK_FALSE(params.Contains("gnn.gcn.W0"));
    } else {
      CHECK(params.value("gnn.gcn.W0") != params.value("gnn.gcn.W1"));
    }
  }
}

}  // namespace
}  // namespace treebias
