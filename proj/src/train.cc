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

#include "treebias/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spdlog/spdlog.h"
#include "treebias/errors.h"

namespace treebias {

Var UtteranceLoss(Tape& tape, const BiasedModel& model, ParamStore& params,
                  const Utterance& utt, const PrefixTree* tree, double* pgen_sum) {
  if (utt.pieces.size() != utt.frames.size() || utt.pieces.empty()) {
    throw DomainError("utterance needs one frame per piece");
  }
  if (model.tcpgen() && tree == nullptr) throw DomainError("pointer training needs a tree");
  const ModelSource source(model.base(), utt.frames);
  TreeEncoding enc;
  if (model.tcpgen()) enc = model.EncodeTree(tape, *tree, params);
  Var carry = source.InitialCarry(tape);
  int prev = model.base().bos_id();
  TraversalState state;
  std::vector<Var> losses;
  for (int t = 0; t < source.num_steps(); ++t) {
    const int target = utt.pieces[t];
    const PosteriorSource::Output out = source.Step(tape, params, carry, prev, t);
    Var p;
    if (model.tcpgen()) {
      const BiasedModel::PointerStep ps =
          model.Point(tape, params, *tree, enc, state, out.state, prev);
      if (pgen_sum != nullptr) *pgen_sum += ps.p_gen.scalar();
      p = FinalProbability(out.probs, ps.ptr, ps.p_gen, target);
      state = Advance(*tree, state, target);
    } else {
      p = ad::Pick(out.probs, 0, target);
    }
    losses.push_back(ad::Log(p));
    carry = out.carry;
    prev = target;
  }
  const Var total = ad::Sum(ad::ConcatCols(losses));
  return ad::Scale(total, -1.0 / static_cast<double>(losses.size()));
}

TrainResult TrainToy(const BiasedModel& model, ParamStore& params,
                     const std::vector<Utterance>& corpus, const Vocab& vocab,
                     const BiasingSpec& spec, const TrainConfig& cfg, std::mt19937_64& rng) {
  if (cfg.epochs < 0 || !(cfg.learning_rate > 0) || !(cfg.clip_norm > 0)) {
    throw DomainError("invalid training configuration");
  }
  if (cfg.freeze_base) {
    params.SetTrainable("base.", false);
    params.SetTrainable(kEmbeddingParam, false);
  }
  TrainResult result;
  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    double pgen_sum = 0.0;
    size_t steps = 0;
    for (size_t idx : order) {
      const Utterance& utt = corpus[idx];
      PrefixTree tree;
      if (model.tcpgen()) {
        std::vector<std::string> list = BuildBiasingList(utt.words, spec, rng);
        list = DropForTraining(list, utt.words, cfg.p_drop, rng);
        tree = PrefixTree::Build(TokenizeAll(list, vocab));
      }
      Tape tape;
      const Var loss = UtteranceLoss(tape, model, params, utt, &tree, &pgen_sum);
      const double value = loss.scalar();
      if (!std::isfinite(value)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch + 1) +
                           ", utterance " + std::to_string(idx));
      }
      params.ZeroGrad();
      tape.Backward(loss);
      const double norm = params.ClipGradNorm(cfg.clip_norm);
      if (!std::isfinite(norm)) {
        throw NumericError("non-finite gradient at epoch " + std::to_string(epoch + 1) +
                           ", utterance " + std::to_string(idx));
      }
      params.SgdStep(cfg.learning_rate);
      loss_sum += value;
      steps += utt.pieces.size();
    }
    const double n = std::max<size_t>(corpus.size(), 1);
    result.epoch_loss.push_back(loss_sum / n);
    if (model.tcpgen()) result.epoch_pgen.push_back(steps ? pgen_sum / steps : 0.0);
    spdlog::info("epoch {}: loss {:.6f}{}", epoch + 1, result.epoch_loss.back(),
                 model.tcpgen() ? fmt::format(", mean p_gen {:.4f}", result.epoch_pgen.back())
                                : std::string());
  }
  if (cfg.freeze_base) {
    params.SetTrainable("base.", true);
    params.SetTrainable(kEmbeddingParam, true);
  }
  return result;
}

}  // namespace treebias
