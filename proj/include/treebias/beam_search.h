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

#ifndef TREEBIAS_BEAM_SEARCH_H_
#define TREEBIAS_BEAM_SEARCH_H_

#include <string>
#include <vector>

#include "treebias/biased_model.h"
#include "treebias/scorer.h"
#include "treebias/tensor.h"
#include "treebias/toy_lm.h"
#include "treebias/trie.h"

namespace treebias {

enum class DecodeMode { kPlain, kTcpgen, kBlmd };

std::string DecodeModeName(DecodeMode mode);
DecodeMode ParseDecodeMode(const std::string& name);

struct DecodeConfig {
  int beam = 4;
  DecodeMode mode = DecodeMode::kTcpgen;
  // Test switch: run the pointer but interpolate with p_gen = 0.
  bool force_pgen_zero = false;
  bool trace = false;
  BlmdForm blmd_form = BlmdForm::kConsistent;
  double a1 = 0.0, b1 = 0.0, a2 = 0.0, b2 = 0.0;
};

// Source and target LMs for the discounting mode.
struct BlmdLms {
  const BigramLm* source = nullptr;
  const BigramLm* target = nullptr;
};

struct TraceStep {
  int t = 0;
  int emitted = -1;
  std::vector<int> valid_pieces;
  double p_mdl = 0.0;
  double p_gen = 0.0;
  double p_gen_scaled = 0.0;
  double p_ool = 1.0;
  double p_final = 0.0;
};

struct Hypothesis {
  // Emitted real pieces; transducer blanks are not recorded.
  std::vector<int> pieces;
  double score = 0.0;
  // Recurrent carry of the posterior source after the last step.
  Tensor carry;
  TraversalState traversal;
  std::vector<TraceStep> trace;
  int prev_token = -1;
};

// Beam search over source.num_steps() steps, one output symbol per step.
// Candidates are ranked by score, then by the index of the hypothesis they
// extend, then by piece id. tree may be null in plain mode.
Hypothesis BeamSearch(const BiasedModel& model, ParamStore& params, const PosteriorSource& source,
                      const PrefixTree* tree, const DecodeConfig& cfg,
                      const BlmdLms* lms = nullptr);

// Traversal state reached by advancing from the root over the pieces.
TraversalState ReplayTraversal(const PrefixTree& tree, const std::vector<int>& pieces);

}  // namespace treebias

#endif  // TREEBIAS_BEAM_SEARCH_H_
