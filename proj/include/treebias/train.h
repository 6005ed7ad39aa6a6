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

#ifndef TREEBIAS_TRAIN_H_
#define TREEBIAS_TRAIN_H_

#include <random>
#include <vector>

#include "treebias/biased_model.h"
#include "treebias/biasing.h"
#include "treebias/synth.h"
#include "treebias/wordpiece.h"

namespace treebias {

struct TrainConfig {
  int epochs = 2;
  double learning_rate = 0.1;
  double clip_norm = 5.0;
  // Training-time removal of reference words from the biasing list.
  double p_drop = 0.3;
  // Keep the base model and the embedding table fixed.
  bool freeze_base = false;
  bool shuffle = true;
};

struct TrainResult {
  // Mean per-utterance loss of each epoch.
  std::vector<double> epoch_loss;
  // Mean generation probability over all steps of each epoch (pointer
  // models only).
  std::vector<double> epoch_pgen;
};

// Teacher-forced cross entropy, -log p_final of the reference pieces
// averaged per utterance (-log p_mdl for models without a pointer), with
// one clipped SGD step per utterance. Biasing lists are simulated per
// utterance and epoch. Throws NumericError on a non-finite loss.
TrainResult TrainToy(const BiasedModel& model, ParamStore& params,
                     const std::vector<Utterance>& corpus, const Vocab& vocab,
                     const BiasingSpec& spec, const TrainConfig& cfg, std::mt19937_64& rng);

// Teacher-forced loss of one utterance on the given tape. Also returns
// the summed generation probability through pgen_sum when non-null.
Var UtteranceLoss(Tape& tape, const BiasedModel& model, ParamStore& params,
                  const Utterance& utt, const PrefixTree* tree, double* pgen_sum = nullptr);

}  // namespace treebias

#endif  // TREEBIAS_TRAIN_H_
