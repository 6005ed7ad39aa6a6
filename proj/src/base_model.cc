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

#include "treebias/base_model.h"

#include "treebias/errors.h"
#include "treebias/gnn.h"

namespace treebias {

BaseModel::BaseModel(BaseModelConfig cfg) : cfg_(cfg) {
  if (cfg_.vocab_size <= 0 || cfg_.token_count < cfg_.vocab_size || cfg_.num_classes <= 0 ||
      cfg_.embedding_dim <= 0 || cfg_.hidden_dim <= 0 || cfg_.frame_dim <= 0) {
    throw DomainError("invalid base model configuration");
  }
}

void BaseModel::InitParams(ParamStore& params, std::mt19937_64& rng) const {
  params.Add(kEmbeddingParam, Gaussian(cfg_.token_count + 1, cfg_.embedding_dim, 0.3, rng));
  params.Add("base.frames", Gaussian(cfg_.num_classes + 1, cfg_.frame_dim, 0.3, rng));
  params.Add("base.Wh", XavierUniform(cfg_.hidden_dim, cfg_.hidden_dim, rng));
  params.Add("base.Wx", XavierUniform(cfg_.hidden_dim, cfg_.embedding_dim, rng));
  params.Add("base.Wc", XavierUniform(cfg_.hidden_dim, 2 * cfg_.frame_dim, rng));
  params.Add("base.b", Tensor(1, cfg_.hidden_dim, 0.0));
  params.Add("base.Wo", XavierUniform(cfg_.vocab_size, state_dim(), rng));
  params.Add("base.bo", Tensor(1, cfg_.vocab_size, 0.0));
}

Var BaseModel::InitialHidden(Tape& tape) const {
  return tape.Constant(Tensor(1, cfg_.hidden_dim));
}

Var BaseModel::Embed(Tape& tape, ParamStore& params, int token) const {
  if (token < 0 || token >= cfg_.token_count) throw DomainError("token id out of range");
  return ad::GatherRows(tape.Param(params, kEmbeddingParam), {token});
}

BaseModel::Step BaseModel::Forward(Tape& tape, ParamStore& params, const Var& prev_hidden,
                                   int prev_token, int frame, int next_frame) const {
  if (frame < 0 || frame > cfg_.num_classes || next_frame < 0 || next_frame > cfg_.num_classes) {
    throw DomainError("frame id out of range");
  }
  const Var frames = ad::GatherRows(tape.Param(params, "base.frames"), {frame, next_frame});
  // [f_i; f_{i+1}] as one row.
  const Var halves[] = {ad::GatherRows(frames, {0}), ad::GatherRows(frames, {1})};
  const Var context = ad::ConcatCols(halves);
  Var pre = ad::MatMulBT(prev_hidden, tape.Param(params, "base.Wh"));
  pre = ad::Add(pre, ad::MatMulBT(Embed(tape, params, prev_token), tape.Param(params, "base.Wx")));
  pre = ad::Add(pre, ad::MatMulBT(context, tape.Param(params, "base.Wc")));
  Step step;
  step.hidden = ad::Tanh(ad::Add(pre, tape.Param(params, "base.b")));
  const Var state_parts[] = {step.hidden, context};
  step.state = ad::ConcatCols(state_parts);
  const Var logits = ad::Add(ad::MatMulBT(step.state, tape.Param(params, "base.Wo")),
                             tape.Param(params, "base.bo"));
  step.probs = ad::Softmax(logits);
  return step;
}

}  // namespace treebias
