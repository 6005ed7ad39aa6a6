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
#include <numeric>

#include "doctest.h"
#include "test_util.h"
#include "treebias/biased_model.h"
#include "treebias/errors.h"
#include "treebias/scorer.h"

namespace treebias {
namespace {

std::vector<double> RandomSimplex(int n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  for (double& x : p) x = e(rng);
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= s;
  return p;
}

// A random step over a vocabulary of v pieces with k distinct valid pieces.
StepOutput RandomStep(int v, int k, std::mt19937_64& rng) {
  std::vector<int> ids(v);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  return MakeStep(ids, RandomSimplex(k + 1, rng), {}, std::uniform_real_distribution<>(0, 1)(rng));
}

TEST_CASE("make_query examples") {
  ParamStore params;
  params.Add("tcpgen.Wq", Tensor::Identity(3));
  Tape tape;
  const Var state = tape.Constant(Tensor::Row({1, 2})), emb = tape.Constant(Tensor::Row({3}));
  CHECK(MakeQuery(tape, params, state, emb).value() == Tensor::Row({1, 2, 3}));
  CHECK(MakeQuery(tape, params, tape.Constant(Tensor(1, 2)), tape.Constant(Tensor(1, 1))).value() ==
        Tensor(1, 3));
  CHECK_THROWS_AS(MakeQuery(tape, params, state, state), DomainError);
  params.value("tcpgen.Wq") = Tensor(2, 3, std::vector<double>{1, 0, 2, -1, 3, 0.5});
  Tape fresh;
  // [1*1 + 0*2 + 2*3, -1*1 + 3*2 + 0.5*3]
  CHECK(MakeQuery(fresh, params, fresh.Constant(Tensor::Row({1, 2})),
                  fresh.Constant(Tensor::Row({3})))
            .value() == Tensor::Row({7, 6.5}));
}

ParamStore ScorerParams(const ScorerConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ParamStore params;
  InitScorerParams(params, cfg, rng);
  return params;
}

TEST_CASE("ptr_distribution examples") {
  ScorerConfig cfg{2, 2, 3, 4, true};
  ParamStore params = ScorerParams(cfg, 1);
  Tape tape;
  // Zero keys make every logit equal.
  params.value("tcpgen.WK") = Tensor(4, 3, 0.0);
  const Var q = tape.Constant(Tensor::Row({1, -2, 0.5, 3}));
  std::mt19937_64 rng(2);
  PointerOutput out = PtrDistribution(tape, params, q, tape.Constant(Gaussian(2, 3, 1.0, rng)),
                                      {4, 7}, cfg);
  REQUIRE(out.p_ptr.cols() == 3);
  for (int i = 0; i < 3; ++i) CHECK(out.p_ptr.value()[i] == doctest::Approx(1.0 / 3.0));
  CHECK(out.ool_slot() == 2);

  out = PtrDistribution(tape, params, q, Var(), {}, cfg);
  CHECK(out.p_ptr.value() == Tensor::Row({1.0}));
  // h_ptr is the OOL value vector.
  const Tensor& wv = params.value("tcpgen.WV");
  const Tensor& ool = params.value("tcpgen.ool");
  for (int i = 0; i < 4; ++i) {
    double v = 0;
    for (int k = 0; k < 3; ++k) v += wv(i, k) * ool[k];
    CHECK(out.h_ptr.value()[i] == doctest::Approx(v));
  }
}

TEST_CASE("the pointer's support at node Tur is {in_, n, OOL}") {
  const Vocab vocab = testing::Fig2Vocab();
  const PrefixTree tree = testing::Fig2Tree(vocab);
  BiasedModelConfig cfg;
  cfg.base = {vocab.size(), vocab.total_size(), 4, 4, 4, 2};
  cfg.encoder.variant = EncoderVariant::kGcn;
  cfg.encoder.dim = 4;
  cfg.attention_dim = 4;
  BiasedModel model(cfg);
  std::mt19937_64 rng(3);
  ParamStore params;
  model.InitParams(params, rng);
  const int tur = *vocab.Find("Tur");
  const TraversalState at_tur = Advance(tree, {}, tur);
  Tape tape(false);
  const TreeEncoding enc = model.EncodeTree(tape, tree, params);
  const auto step = model.Point(tape, params, tree, enc, at_tur,
                                tape.Constant(Tensor(1, model.base().state_dim(), 0.1)), tur);
  std::vector<int> support = step.ptr.pieces;
  std::sort(support.begin(), support.end());
  std::vector<int> expected = {*vocab.Find("in_"), *vocab.Find("n")};
  std::sort(expected.begin(), expected.end());
  CHECK(support == expected);
  CHECK(step.ptr.p_ptr.cols() == 3);
  const double p = step.p_gen.scalar();
  CHECK(p > 0.0);
  CHECK(p < 1.0);
}

TEST_CASE("generation_prob examples") {
  ScorerConfig cfg{2, 2, 3, 2, true};
  ParamStore params = ScorerParams(cfg, 4);
  auto p_gen = [&](const Tensor& w, double b) {
    params.value("tcpgen.gen_w") = w;
    params.value("tcpgen.gen_b") = Tensor(1, 1, b);
    Tape tape;
    return GenerationProb(tape, params, tape.Constant(Tensor::Row({0.3, -1})),
                          tape.Constant(Tensor::Row({2, 0.5})))
        .scalar();
  };
  CHECK(p_gen(Tensor(1, 4, 0.0), 0.0) == 0.5);
  CHECK(p_gen(Tensor(1, 4, 0.0), -50.0) < 1e-20);
  // 0.3 - 2 - 2 + 2 + 0.1 = -1.6
  CHECK(p_gen(Tensor::Row({1, 2, -1, 4}), 0.1) ==
        doctest::Approx(1.0 / (1.0 + std::exp(1.6))).epsilon(1e-15));
  Tape tape;
  CHECK_THROWS_AS(GenerationProb(tape, params, tape.Constant(Tensor(1, 2)), tape.Constant(Tensor(1, 3))),
                  DomainError);
}

TEST_CASE("interpolate examples") {
  const std::vector<double> p_mdl = {0.5, 0.5};
  StepOutput s = MakeStep({0}, {1.0, 0.0}, {}, 0.5);
  const auto out = Interpolate(p_mdl, 2, s);
  CHECK(out[0] == 0.75);
  CHECK(out[1] == 0.25);

  std::mt19937_64 rng(5);
  const auto p = RandomSimplex(6, rng);
  s = MakeStep({1, 3}, {0.2, 0.3, 0.5}, {}, 0.0);
  CHECK(Interpolate(p, 6, s) == p);
  s = MakeStep({1, 3}, {0.0, 0.0, 1.0}, {}, 0.7);
  CHECK(s.p_gen_scaled == 0.0);
  CHECK(Interpolate(p, 6, s) == p);
}

TEST_CASE("nt_null_adjust examples") {
  std::vector<double> p = {0.3, 0.5, 0.2};
  CHECK(NtNullAdjust(p, 2, 0.5) == doctest::Approx(0.4).epsilon(1e-15));
  p = {0.0, 0.0, 1.0};
  CHECK(NtNullAdjust(p, 2, 0.5) == 0.0);
  StepOutput s = MakeStep({0}, {0.9, 0.1}, {}, NtNullAdjust(p, 2, 0.5));
  CHECK(Interpolate(p, 2, s) == p);
  p = {0.6, 0.4, 0.0};
  CHECK(NtNullAdjust(p, 2, 0.5) == 0.5);
  CHECK_THROWS_AS(NtNullAdjust(p, 3, 0.5), DomainError);
}

TEST_CASE("interpolation with a blank keeps the blank on the model side") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = RandomSimplex(6, rng);  // five pieces plus blank
    StepOutput raw = RandomStep(5, 1 + int(rng() % 4), rng);
    const StepOutput s = MakeStep(raw.valid_pieces, raw.p_ptr, {}, NtNullAdjust(p, 5, raw.p_gen));
    const auto out = Interpolate(p, 5, s);
    CHECK(out[5] == p[5] * (1.0 - s.p_gen_scaled));
    CHECK(std::abs(std::accumulate(out.begin(), out.end(), 0.0) - 1.0) <= 1e-9);
  }
}

TEST_CASE("blmd_score examples") {
  const std::vector<double> p_mdl = {0.6, 0.4};
  const StepOutput s = MakeStep({0}, {0.5, 0.5}, {}, 0.4);
  LmScores lm{{0.5, 0.5}, {0.8, 0.2}, 1.0, 0.5, 0.0, 0.0};
  const auto out = BlmdScore(p_mdl, 2, s, lm);
  CHECK(out[0] == doctest::Approx(0.8 * 0.6 * 0.8 / std::sqrt(0.5) + 0.4 * 0.5).epsilon(1e-14));
  CHECK(out[1] == doctest::Approx(0.8 * 0.4 * 0.2 / std::sqrt(0.5)).epsilon(1e-14));
  const auto literal = BlmdScore(p_mdl, 2, s, lm, BlmdForm::kLiteral);
  CHECK(literal[1] == doctest::Approx(0.6 * 0.4 * 0.2 / std::sqrt(0.5)).epsilon(1e-14));
  lm.b1 = -1.0;
  CHECK_THROWS_AS(BlmdScore(p_mdl, 2, s, lm), DomainError);
}

TEST_CASE("blmd floors a zero source probability") {
  const std::vector<double> p_mdl = {0.5, 0.5};
  const StepOutput s = MakeStep({}, {1.0}, {}, 0.3);
  const LmScores lm{{0.0, 1.0}, {0.5, 0.5}, 0.0, 1.0, 0.0, 0.0};
  const auto out = BlmdScore(p_mdl, 2, s, lm);
  CHECK(out[0] == doctest::Approx(0.5 / kLmFloor));
  CHECK(std::isfinite(out[0]));
}

TEST_CASE("degenerate reductions hold exactly on random inputs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const int v = 2 + int(rng() % 10);
    const auto p = RandomSimplex(v, rng);
    const StepOutput s = RandomStep(v, 1 + int(rng() % (v - 1)), rng);
    LmScores lm{RandomSimplex(v, rng), RandomSimplex(v, rng), 0, 0, 0, 0};
    CHECK(BlmdScore(p, v, s, lm) == Interpolate(p, v, s));
    const StepOutput off = MakeStep(s.valid_pieces, s.p_ptr, {}, 0.0);
    lm.a1 = 0.7;
    lm.b1 = 0.3;
    lm.a2 = 1.1;
    lm.b2 = 0.2;
    CHECK(BlmdScore(p, v, off, lm) == LmDiscount(p, v, lm.p_src, lm.p_tgt, 0.7, 0.3));
  }
}

TEST_CASE("interpolation normalises, respects the mask and is monotone in p_gen") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 2000; ++trial) {
    const int v = 2 + int(rng() % 20);
    const auto p = RandomSimplex(v, rng);
    const StepOutput s = RandomStep(v, int(rng() % v), rng);
    const auto out = Interpolate(p, v, s);
    CHECK(std::abs(std::accumulate(out.begin(), out.end(), 0.0) - 1.0) <= 1e-9);
    for (int y = 0; y < v; ++y) {
      if (std::find(s.valid_pieces.begin(), s.valid_pieces.end(), y) == s.valid_pieces.end()) {
        CHECK(out[y] == p[y] * (1.0 - s.p_gen_scaled));
      }
    }
    if (s.valid_pieces.empty()) continue;
    const size_t best = std::max_element(s.p_ptr.begin(), s.p_ptr.end() - 1) - s.p_ptr.begin();
    const int y = s.valid_pieces[best];
    if (s.p_ptr[best] < p[y] * (1.0 - s.p_ool())) continue;
    const double higher = s.p_gen + (1.0 - s.p_gen) * 0.5;
    const auto more = Interpolate(p, v, MakeStep(s.valid_pieces, s.p_ptr, {}, higher));
    CHECK(more[y] >= out[y] - 1e-15);
  }
}

TEST_CASE("final probability on the tape matches interpolate") {
  std::mt19937_64 rng(9);
  Tape tape;
  const auto p = RandomSimplex(5, rng);
  PointerOutput ptr;
  ptr.pieces = {1, 4};
  ptr.p_ptr = tape.Constant(Tensor::Row({0.5, 0.2, 0.3}));
  const Var g = tape.Constant(Tensor(1, 1, 0.6));
  const auto expected = Interpolate(p, 5, MakeStep({1, 4}, {0.5, 0.2, 0.3}, {}, 0.6));
  for (int y = 0; y < 5; ++y) {
    CHECK(FinalProbability(tape.Constant(Tensor::Row(p)), ptr, g, y).scalar() ==
          doctest::Approx(expected[y]).epsilon(1e-15));
  }
}

TEST_CASE("cross entropy through the scorer passes grad_check") {
  const Vocab vocab = testing::Fig2Vocab();
  const PrefixTree tree = testing::Fig2Tree(vocab);
  for (bool ool_value : {true, false}) {
    BiasedModelConfig cfg;
    cfg.base = {vocab.size(), vocab.total_size(), 3, 3, 3, 2};
    cfg.encoder.variant = EncoderVariant::kGcn;
    cfg.encoder.dim = 3;
    cfg.attention_dim = 3;
    cfg.ool_value_in_output = ool_value;
    BiasedModel model(cfg);
    std::mt19937_64 rng(10);
    ParamStore params;
    model.InitParams(params, rng);
    const int tur = *vocab.Find("Tur"), in = *vocab.Find("in_");
    const TraversalState at_tur = Advance(tree, {}, tur);
    const Tensor state = Gaussian(1, model.base().state_dim(), 1.0, rng);
    const Tensor p_mdl = Tensor::Row(RandomSimplex(vocab.size(), rng));
    const GradCheckResult r = GradCheck(
        [&](Tape& t, ParamStore& p) {
          const TreeEncoding enc = model.EncodeTree(t, tree, p);
          const auto step = model.Point(t, p, tree, enc, at_tur, t.Constant(state), tur);
          return ad::Scale(ad::Log(FinalProbability(t.Constant(p_mdl), step.ptr, step.p_gen, in)),
                           -1.0);
        },
        params, 1e-5);
    CHECK(r.max_rel_error < 1e-4);
  }
}

}  // namespace
}  // namespace treebias
