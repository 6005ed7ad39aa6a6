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
#include <fstream>
#include <set>

#include "doctest.h"
#include "test_util.h"
#include "treebias/beam_search.h"
#include "treebias/biasing.h"
#include "treebias/errors.h"
#include "treebias/replay.h"
#include "treebias/synth.h"
#include "treebias/toy_lm.h"
#include "treebias/train.h"

namespace treebias {
namespace {

BiasedModelConfig SmallConfig(const Vocab& vocab, int classes, EncoderVariant variant) {
  BiasedModelConfig cfg;
  cfg.base = {vocab.size(), vocab.total_size(), classes, 6, 8, 3};
  cfg.encoder.variant = variant;
  cfg.encoder.dim = 6;
  cfg.attention_dim = 6;
  return cfg;
}

TEST_CASE("build_biasing_list examples") {
  const BiasingSpec spec{{"turner", "vignette", "turin", "a", "b", "c", "d"}, 1};
  std::mt19937_64 rng(1);
  const std::vector<std::string> ref = {"the", "vignette", "of", "turner"};
  const auto list = BuildBiasingList(ref, spec, rng);
  CHECK(list.size() == 3);
  CHECK(list[0] == "vignette");
  CHECK(list[1] == "turner");

  BiasingSpec big;
  for (int i = 0; i < 300; ++i) big.full_rare_list.push_back("r" + std::to_string(i));
  const auto d = BuildBiasingList({"nothing", "rare"}, big, rng);
  CHECK(d.size() == 100);
  CHECK(std::set<std::string>(d.begin(), d.end()).size() == 100);

  std::mt19937_64 a(5), b(5);
  CHECK(BuildBiasingList(ref, big, a) == BuildBiasingList(ref, big, b));

  // A short pool is taken whole.
  std::mt19937_64 c(6);
  const BiasingSpec short_pool{spec.full_rare_list, 100};
  CHECK(BuildBiasingList({}, short_pool, c).size() == spec.full_rare_list.size());
}

TEST_CASE("drop_for_training examples") {
  const std::vector<std::string> list = {"turner", "vignette", "x", "y"};
  const std::vector<std::string> ref = {"turner", "vignette"};
  std::mt19937_64 rng(2);
  CHECK(DropForTraining(list, ref, 0.0, rng) == list);
  CHECK(DropForTraining(list, ref, 1.0, rng) == std::vector<std::string>{"x", "y"});
  CHECK_THROWS_AS(DropForTraining(list, ref, 1.5, rng), DomainError);
  long dropped = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const auto kept = DropForTraining({"w"}, {"w"}, 0.3, rng);
    dropped += kept.empty();
  }
  CHECK(std::abs(double(dropped) / trials - 0.3) <= 0.02);
}

// Greedy argmax decoding of the base model, written out independently.
std::vector<int> Greedy(const BiasedModel& model, ParamStore& params, const std::vector<int>& frames) {
  Tape tape(false);
  const BaseModel& base = model.base();
  Var h = base.InitialHidden(tape);
  int prev = base.bos_id();
  std::vector<int> out;
  for (size_t t = 0; t < frames.size(); ++t) {
    const int next = t + 1 < frames.size() ? frames[t + 1] : base.pad_frame();
    const BaseModel::Step s = base.Forward(tape, params, h, prev, frames[t], next);
    const auto& p = s.probs.value().values();
    prev = int(std::max_element(p.begin(), p.end()) - p.begin());
    out.push_back(prev);
    h = s.hidden;
  }
  return out;
}

struct Fixture {
  SynthCorpus corpus;
  BiasedModel model;
  ParamStore params;

  explicit Fixture(EncoderVariant variant, std::uint64_t seed = 3)
      : corpus(MakeCorpus(seed)),
        model(SmallConfig(corpus.vocab, corpus.num_classes, variant)) {
    std::mt19937_64 rng(seed);
    model.InitParams(params, rng);
  }
  static SynthCorpus MakeCorpus(std::uint64_t seed) {
    SynthConfig cfg;
    cfg.n_train = 200;
    cfg.n_dev = 10;
    cfg.n_test = 20;
    cfg.n_fillers = 30;
    cfg.n_rare = 20;
    cfg.n_train_tail = 40;
    cfg.train_rare_rate = 0.1;
    std::mt19937_64 rng(seed);
    return SynthesizeCorpus(cfg, rng);
  }
  PrefixTree Tree(const Utterance& utt, std::mt19937_64& rng) const {
    const BiasingSpec spec{corpus.rare_words, 10};
    return PrefixTree::Build(TokenizeAll(BuildBiasingList(utt.words, spec, rng), corpus.vocab));
  }
};

TEST_CASE("beam 1 in plain mode is greedy decoding") {
  Fixture f(EncoderVariant::kNone);
  DecodeConfig cfg;
  cfg.beam = 1;
  cfg.mode = DecodeMode::kPlain;
  for (const Utterance& u : f.corpus.test) {
    const ModelSource src(f.model.base(), u.frames);
    CHECK(BeamSearch(f.model, f.params, src, nullptr, cfg).pieces == Greedy(f.model, f.params, u.frames));
  }
  cfg.beam = 0;
  const ModelSource src(f.model.base(), f.corpus.test[0].frames);
  CHECK_THROWS_AS(BeamSearch(f.model, f.params, src, nullptr, cfg), DomainError);
}

// Log-probability of a piece sequence under the base model.
double SequenceLogProb(const BiasedModel& model, ParamStore& params, const std::vector<int>& frames,
                       const std::vector<int>& pieces) {
  Tape tape(false);
  const BaseModel& base = model.base();
  Var h = base.InitialHidden(tape);
  int prev = base.bos_id();
  double total = 0;
  for (size_t t = 0; t < frames.size(); ++t) {
    const int next = t + 1 < frames.size() ? frames[t + 1] : base.pad_frame();
    const BaseModel::Step s = base.Forward(tape, params, h, prev, frames[t], next);
    total += std::log(s.probs.value()[pieces[t]]);
    prev = pieces[t];
    h = s.hidden;
  }
  return total;
}

TEST_CASE("beam scores are the log-probabilities of the returned pieces") {
  Fixture f(EncoderVariant::kNone, 2);
  for (int beam : {1, 3, 8}) {
    DecodeConfig cfg;
    cfg.beam = beam;
    cfg.mode = DecodeMode::kPlain;
    for (const Utterance& u : f.corpus.test) {
      const Hypothesis h = BeamSearch(f.model, f.params, ModelSource(f.model.base(), u.frames),
                                      nullptr, cfg);
      CHECK(h.score == doctest::Approx(SequenceLogProb(f.model, f.params, u.frames, h.pieces))
                           .epsilon(1e-12));
    }
  }
}

TEST_CASE("forcing p_gen to zero reproduces plain decoding") {
  Fixture f(EncoderVariant::kGcn);
  std::mt19937_64 rng(4);
  for (const Utterance& u : f.corpus.test) {
    const PrefixTree tree = f.Tree(u, rng);
    const ModelSource src(f.model.base(), u.frames);
    DecodeConfig plain;
    plain.beam = 3;
    plain.mode = DecodeMode::kPlain;
    DecodeConfig zero = plain;
    zero.mode = DecodeMode::kTcpgen;
    zero.force_pgen_zero = true;
    const Hypothesis a = BeamSearch(f.model, f.params, src, &tree, plain);
    const Hypothesis b = BeamSearch(f.model, f.params, src, &tree, zero);
    CHECK(a.pieces == b.pieces);
    CHECK(a.score == b.score);
  }
}

TEST_CASE("hypothesis traversal equals replaying its pieces") {
  Fixture f(EncoderVariant::kSage);
  std::mt19937_64 rng(5);
  DecodeConfig cfg;
  cfg.beam = 3;
  cfg.trace = true;
  for (const Utterance& u : f.corpus.test) {
    const PrefixTree tree = f.Tree(u, rng);
    const Hypothesis h = BeamSearch(f.model, f.params, ModelSource(f.model.base(), u.frames), &tree, cfg);
    CHECK(h.traversal == ReplayTraversal(tree, h.pieces));
    CHECK(h.trace.size() == u.frames.size());
  }
}

// Beam search is not monotone in the width in general: a wider beam can
// keep prefixes that crowd out the narrow beam's eventual winner. What
// holds is that a beam wide enough to keep every prefix finds the optimum,
// which bounds every narrower beam.
TEST_CASE("an exhaustive beam dominates every narrower beam") {
  long violations = 0, pairs = 0;
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    Fixture f(EncoderVariant::kNone, seed);
    const int v = f.corpus.vocab.size();
    for (size_t i = 0; i < 4; ++i) {
      std::vector<int> frames = f.corpus.test[i].frames;
      frames.resize(3);
      const ModelSource src(f.model.base(), frames);
      DecodeConfig cfg;
      cfg.mode = DecodeMode::kPlain;
      cfg.beam = v * v;
      const double best = BeamSearch(f.model, f.params, src, nullptr, cfg).score;
      for (int beam : {1, 2, 4, 8}) {
        cfg.beam = beam;
        CHECK(BeamSearch(f.model, f.params, src, nullptr, cfg).score <= best);
      }
    }
    // Full-length utterances: record how often the width ordering breaks.
    for (const Utterance& u : f.corpus.test) {
      const ModelSource src(f.model.base(), u.frames);
      DecodeConfig cfg;
      cfg.mode = DecodeMode::kPlain;
      double prev = BeamSearch(f.model, f.params, src, nullptr, cfg).score;
      for (int beam : {2, 4, 8}) {
        cfg.beam = beam;
        const double score = BeamSearch(f.model, f.params, src, nullptr, cfg).score;
        violations += score < prev;
        ++pairs;
        prev = score;
      }
    }
  }
  MESSAGE("width pairs where the wider beam scored lower: " << violations << " of " << pairs);
}

TEST_CASE("with a uniform model, a trained pointer spells the listed word") {
  const Vocab vocab = testing::Fig2Vocab();
  BiasedModelConfig cfg = SmallConfig(vocab, 2, EncoderVariant::kGcn);
  BiasedModel model(cfg);
  std::mt19937_64 rng(6);
  ParamStore params;
  model.InitParams(params, rng);
  params.value("base.Wo") = Tensor(params.value("base.Wo").rows(), params.value("base.Wo").cols());
  params.value("base.bo") = Tensor(params.value("base.bo").rows(), params.value("base.bo").cols());

  const std::vector<std::string> words = {"turner", "vignette", "turin"};
  std::vector<Utterance> corpus;
  for (int i = 0; i < 60; ++i) {
    Utterance u;
    u.words = {words[i % 3]};
    u.pieces = Tokenize(u.words[0], vocab).pieces;
    u.frames.assign(u.pieces.size(), 0);
    corpus.push_back(u);
  }
  TrainConfig tc;
  tc.epochs = 3;
  tc.freeze_base = true;
  tc.p_drop = 0.0;
  const TrainResult r = TrainToy(model, params, corpus, vocab, {words, 0}, tc, rng);
  CHECK(r.epoch_loss.back() < r.epoch_loss.front());

  const std::vector<std::string> list = {"turin"};
  const PrefixTree tree = PrefixTree::Build(TokenizeAll(list, vocab));
  DecodeConfig dc;
  dc.beam = 2;
  const Hypothesis h = BeamSearch(model, params, ModelSource(model.base(), {0, 0}), &tree, dc);
  CHECK(h.pieces == std::vector<int>{*vocab.Find("Tur"), *vocab.Find("in_")});
}

TEST_CASE("training lowers the loss and is deterministic") {
  auto run = [] {
    Fixture f(EncoderVariant::kGcn, 7);
    TrainConfig tc;
    tc.epochs = 2;
    std::mt19937_64 rng(8);
    return TrainToy(f.model, f.params, f.corpus.train, f.corpus.vocab,
                    {f.corpus.train_rare_words, 10}, tc, rng);
  };
  const TrainResult a = run();
  REQUIRE(a.epoch_loss.size() == 2);
  CHECK(a.epoch_loss[1] < a.epoch_loss[0]);
  const TrainResult b = run();
  CHECK(a.epoch_loss == b.epoch_loss);
  CHECK(a.epoch_pgen == b.epoch_pgen);
}

TEST_CASE("never-matching lists drive p_gen down") {
  Fixture f(EncoderVariant::kNone, 9);
  // Raise the starting point so the drift is visible.
  f.params.value("tcpgen.gen_b") = Tensor(1, 1, 1.0);
  TrainConfig tc;
  tc.epochs = 3;
  tc.p_drop = 1.0;
  std::mt19937_64 rng(10);
  const TrainResult r =
      TrainToy(f.model, f.params, f.corpus.train, f.corpus.vocab, {f.corpus.rare_words, 10}, tc, rng);
  CHECK(r.epoch_pgen.back() < r.epoch_pgen.front());
  CHECK(r.epoch_pgen.back() < 0.5);
}

TEST_CASE("synthetic corpus properties") {
  SynthConfig cfg;
  cfg.n_train = 100;
  cfg.n_dev = 10;
  cfg.n_test = 50;
  cfg.n_train_tail = 20;
  cfg.rare_rate = 0.0;
  cfg.train_rare_rate = 0.0;
  std::mt19937_64 rng(11);
  SynthCorpus c = SynthesizeCorpus(cfg, rng);
  const std::set<std::string> fillers(c.fillers.begin(), c.fillers.end());
  for (const auto* split : {&c.train, &c.test}) {
    for (const Utterance& u : *split) {
      for (const auto& w : u.words) CHECK(fillers.count(w) == 1);
      CHECK(u.pieces.size() == u.frames.size());
    }
  }

  cfg.rare_rate = 0.3;
  cfg.train_rare_rate = 0.3;
  cfg.oov_fraction = 1.0;
  std::mt19937_64 r1(12), r2(12);
  c = SynthesizeCorpus(cfg, r1);
  CHECK(c.oov_words.size() == c.rare_words.size());
  std::set<std::string> train_words;
  for (const Utterance& u : c.train) train_words.insert(u.words.begin(), u.words.end());
  for (const auto& w : c.rare_words) CHECK(train_words.count(w) == 0);
  CHECK(SynthesizeCorpus(cfg, r2).Digest() == c.Digest());
}

TEST_CASE("bigram LM is a smoothed distribution") {
  BigramLm lm(3, 5, 0.5);
  lm.AddSequence(std::vector<int>{0, 1, 1});
  const auto p = lm.Distribution(5);
  double s = 0;
  for (double x : p) s += x;
  CHECK(s == doctest::Approx(1.0));
  CHECK(lm.Prob(5, 0) == doctest::Approx(1.5 / 2.5));
  CHECK(lm.Prob(1, 1) == doctest::Approx(1.5 / 2.5));
}

TEST_CASE("replayed posteriors with a blank decode like the model") {
  testing::TempDir dir("replay");
  const Vocab vocab = testing::Fig2Vocab();
  const int v = vocab.size();
  // Step 0 favours Tur, step 1 is mostly blank, step 2 favours in_.
  auto row = [&](int peak, bool blank_peak) {
    std::vector<double> p(v + 1, 0.1 / v);
    p[blank_peak ? v : peak] = 0.9;
    return p;
  };
  nlohmann::json line = {{"id", "u1"},
                         {"steps", {row(0, false), row(0, true), row(3, false)}},
                         {"biasing", {"turin"}},
                         {"ref", "turin"}};
  {
    std::ofstream out(dir.path() / "r.jsonl");
    out << line.dump() << "\n";
  }
  const auto utts = LoadReplay(dir.path() / "r.jsonl", v);
  REQUIRE(utts.size() == 1);
  BiasedModel model(SmallConfig(vocab, 2, EncoderVariant::kNone));
  std::mt19937_64 rng(13);
  ParamStore params;
  model.InitParams(params, rng);
  const ReplaySource src(utts[0], v, model.base().state_dim());
  CHECK(src.has_null());
  DecodeConfig cfg;
  cfg.mode = DecodeMode::kPlain;
  CHECK(BeamSearch(model, params, src, nullptr, cfg).pieces == std::vector<int>{0, 3});

  const PrefixTree tree = PrefixTree::Build(TokenizeAll(*utts[0].biasing, vocab));
  cfg.mode = DecodeMode::kTcpgen;
  cfg.trace = true;
  const Hypothesis h = BeamSearch(model, params, src, &tree, cfg);
  CHECK(h.pieces == std::vector<int>{0, 3});
  CHECK(h.traversal == ReplayTraversal(tree, h.pieces));

  line["steps"][0][0] = 5.0;
  {
    std::ofstream out(dir.path() / "bad.jsonl");
    out << line.dump() << "\n";
  }
  CHECK_THROWS_AS(LoadReplay(dir.path() / "bad.jsonl", v), FormatError);
  CHECK_THROWS_AS(LoadReplay(dir.path() / "missing.jsonl", v), FormatError);
}

TEST_CASE("decode mode names") {
  CHECK(ParseDecodeMode("tcpgen+blmd") == DecodeMode::kBlmd);
  CHECK(ParseDecodeMode(DecodeModeName(DecodeMode::kPlain)) == DecodeMode::kPlain);
  CHECK_THROWS_AS(ParseDecodeMode("greedy"), DomainError);
}

}  // namespace
}  // namespace treebias
