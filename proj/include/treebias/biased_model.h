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

#ifndef TREEBIAS_BIASED_MODEL_H_
#define TREEBIAS_BIASED_MODEL_H_

#include <random>
#include <vector>

#include "treebias/base_model.h"
#include "treebias/gnn.h"
#include "treebias/scorer.h"
#include "treebias/trie.h"

namespace treebias {

// Source of the model distribution P^mdl, one step at a time. The carry is
// whatever recurrent state the source threads between steps.
class PosteriorSource {
 public:
  struct Output {
    // 1 x output_size().
    Var probs;
    // Decoder state seen by the scorer, 1 x state_dim.
    Var state;
    Var carry;
  };

  virtual ~PosteriorSource() = default;
  virtual int num_steps() const = 0;
  // Real pieces, plus the transducer blank when has_null().
  virtual int output_size() const = 0;
  virtual bool has_null() const { return false; }
  virtual Var InitialCarry(Tape& tape) const = 0;
  virtual Output Step(Tape& tape, ParamStore& params, const Var& carry, int prev_token,
                      int t) const = 0;
};

// The recurrent base model run over an utterance's frames.
class ModelSource : public PosteriorSource {
 public:
  ModelSource(const BaseModel& model, std::vector<int> frames);

  int num_steps() const override { return static_cast<int>(frames_.size()); }
  int output_size() const override { return model_.config().vocab_size; }
  Var InitialCarry(Tape& tape) const override { return model_.InitialHidden(tape); }
  Output Step(Tape& tape, ParamStore& params, const Var& carry, int prev_token,
              int t) const override;

 private:
  const BaseModel& model_;
  std::vector<int> frames_;
};

struct BiasedModelConfig {
  BaseModelConfig base;
  EncoderConfig encoder;
  int attention_dim = 16;
  bool ool_value_in_output = true;
  // False for the plain baseline: no scorer parameters at all.
  bool tcpgen = true;
};

// Base model plus tree encoder plus pointer-generator scorer, sharing one
// embedding table.
class BiasedModel {
 public:
  explicit BiasedModel(BiasedModelConfig cfg);

  const BiasedModelConfig& config() const { return cfg_; }
  const BaseModel& base() const { return base_; }
  const TreeEncoder& encoder() const { return encoder_; }
  const ScorerConfig& scorer() const { return scorer_; }
  bool tcpgen() const { return cfg_.tcpgen; }

  void InitParams(ParamStore& params, std::mt19937_64& rng) const;
  // Adds only the encoder and scorer parameters, on top of a trained base.
  void InitBiasingParams(ParamStore& params, std::mt19937_64& rng) const;

  TreeEncoding EncodeTree(Tape& tape, const PrefixTree& tree, ParamStore& params) const;

  struct PointerStep {
    PointerOutput ptr;
    Var p_gen;
  };

  PointerStep Point(Tape& tape, ParamStore& params, const PrefixTree& tree,
                    const TreeEncoding& enc, const TraversalState& state,
                    const Var& decoder_state, int prev_token) const;

 private:
  BiasedModelConfig cfg_;
  BaseModel base_;
  TreeEncoder encoder_;
  ScorerConfig scorer_;
};

}  // namespace treebias

#endif  // TREEBIAS_BIASED_MODEL_H_
