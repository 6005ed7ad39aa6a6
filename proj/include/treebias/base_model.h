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

#ifndef TREEBIAS_BASE_MODEL_H_
#define TREEBIAS_BASE_MODEL_H_

#include <random>

#include "treebias/autodiff.h"

namespace treebias {

struct BaseModelConfig {
  // Real word pieces; the output layer covers exactly these.
  int vocab_size = 0;
  // Token ids in the embedding table (pieces + specials); the last one is
  // the start symbol.
  int token_count = 0;
  // Observation classes of the synthetic acoustic channel.
  int num_classes = 0;
  int embedding_dim = 16;
  int hidden_dim = 32;
  int frame_dim = 8;
};

// Single-layer recurrent word-piece decoder. At step i it reads the
// previous piece and a context made of the embeddings of frames i and
// i + 1, the stand-in for an acoustic context vector:
//   h_i = tanh(Wh h_{i-1} + Wx e(y_{i-1}) + Wc c_i + b)
//   P(y_i) = softmax(Wo [h_i; c_i] + bo)
// The decoder state handed to the biasing scorer is [h_i; c_i].
class BaseModel {
 public:
  explicit BaseModel(BaseModelConfig cfg);

  const BaseModelConfig& config() const { return cfg_; }
  int state_dim() const { return cfg_.hidden_dim + 2 * cfg_.frame_dim; }
  // Frame id used past the end of the utterance.
  int pad_frame() const { return cfg_.num_classes; }
  int bos_id() const { return cfg_.token_count - 1; }

  // Adds the shared embedding table ("emb", token_count + 1 rows with the
  // root row last) and the base.* parameters.
  void InitParams(ParamStore& params, std::mt19937_64& rng) const;

  struct Step {
    Var hidden;
    Var state;
    Var probs;
  };

  Var InitialHidden(Tape& tape) const;
  Var Embed(Tape& tape, ParamStore& params, int token) const;
  Step Forward(Tape& tape, ParamStore& params, const Var& prev_hidden, int prev_token,
               int frame, int next_frame) const;

 private:
  BaseModelConfig cfg_;
};

}  // namespace treebias

#endif  // TREEBIAS_BASE_MODEL_H_
