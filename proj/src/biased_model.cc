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

#include "treebias/biased_model.h"

#include <utility>

#include "treebias/errors.h"

namespace treebias {

ModelSource::ModelSource(const BaseModel& model, std::vector<int> frames)
    : model_(model), frames_(std::move(frames)) {}

PosteriorSource::Output ModelSource::Step(Tape& tape, ParamStore& params, const Var& carry,
                                          int prev_token, int t) const {
  if (t < 0 || t >= num_steps()) throw DomainError("step index out of range");
  const int next = t + 1 < num_steps() ? frames_[t + 1] : model_.pad_frame();
  const BaseModel::Step step = model_.Forward(tape, params, carry, prev_token, frames_[t], next);
  return Output{step.probs, step.state, step.hidden};
}

BiasedModel::BiasedModel(BiasedModelConfig cfg)
    : cfg_(cfg), base_(cfg.base), encoder_(cfg.encoder, cfg.base.embedding_dim) {
  if (cfg_.attention_dim <= 0) throw DomainError("attention_dim must be positive");
  if (encoder_.needs_query() && cfg_.attention_dim != encoder_.output_dim()) {
    throw DomainError("attentive combination needs attention_dim equal to the gnn dim");
  }
  scorer_.state_dim = base_.state_dim();
  scorer_.embedding_dim = cfg_.base.embedding_dim;
  scorer_.encoding_dim = encoder_.output_dim();
  scorer_.attention_dim = cfg_.attention_dim;
  scorer_.ool_value_in_output = cfg_.ool_value_in_output;
}

void BiasedModel::InitParams(ParamStore& params, std::mt19937_64& rng) const {
  base_.InitParams(params, rng);
  if (cfg_.tcpgen) InitBiasingParams(params, rng);
}

void BiasedModel::InitBiasingParams(ParamStore& params, std::mt19937_64& rng) const {
  if (!cfg_.tcpgen) return;
  encoder_.InitParams(params, rng);
  InitScorerParams(params, scorer_, rng);
}

TreeEncoding BiasedModel::EncodeTree(Tape& tape, const PrefixTree& tree,
                                     ParamStore& params) const {
  return encoder_.Encode(tape, tree, params);
}

BiasedModel::PointerStep BiasedModel::Point(Tape& tape, ParamStore& params,
                                            const PrefixTree& tree, const TreeEncoding& enc,
                                            const TraversalState& state,
                                            const Var& decoder_state, int prev_token) const {
  std::vector<int> pieces;
  std::vector<int> nodes;
  for (const ValidPiece& v : ValidSet(tree, state)) {
    pieces.push_back(v.piece_id);
    nodes.push_back(v.node);
  }
  const Var query = MakeQuery(tape, params, decoder_state, base_.Embed(tape, params, prev_token));
  Var rows;
  if (!nodes.empty()) {
    rows = encoder_.Rows(tape, enc, nodes, params,
                         encoder_.needs_query() ? std::optional<Var>(query) : std::nullopt);
  }
  PointerStep out;
  out.ptr = PtrDistribution(tape, params, query, rows, std::move(pieces), scorer_);
  out.p_gen = GenerationProb(tape, params, decoder_state, out.ptr.h_ptr);
  return out;
}

}  // namespace treebias
