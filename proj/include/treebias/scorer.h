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

#ifndef TREEBIAS_SCORER_H_
#define TREEBIAS_SCORER_H_

#include <random>
#include <span>
#include <vector>

#include "treebias/autodiff.h"
#include "treebias/trie.h"

namespace treebias {

// Widths of the pointer-generator scorer. The query is built from the
// decoder state and the previous piece embedding; keys and values are
// projections of tree node encodings.
struct ScorerConfig {
  int state_dim = 0;
  int embedding_dim = 0;
  int encoding_dim = 0;
  int attention_dim = 0;
  // h_ptr sums the OOL value vector weighted by its probability.
  bool ool_value_in_output = true;
};

// Parameters: tcpgen.Wq, tcpgen.WK, tcpgen.WV, tcpgen.ool (learned OOL
// encoding), tcpgen.gen_w, tcpgen.gen_b.
void InitScorerParams(ParamStore& params, const ScorerConfig& cfg, std::mt19937_64& rng);

// q = Wq [state; prev_emb].
Var MakeQuery(Tape& tape, ParamStore& params, const Var& state, const Var& prev_emb);

struct PointerOutput {
  // 1 x (k + 1): valid pieces in order, then OOL.
  Var p_ptr;
  // 1 x attention_dim.
  Var h_ptr;
  std::vector<int> pieces;
  int ool_slot() const { return static_cast<int>(pieces.size()); }
};

// Masked scaled dot-product attention over the valid pieces plus OOL.
// valid_encodings is k x encoding_dim and may be unbound when k = 0, in
// which case all mass goes to OOL.
PointerOutput PtrDistribution(Tape& tape, ParamStore& params, const Var& query,
                              const Var& valid_encodings, std::vector<int> valid_pieces,
                              const ScorerConfig& cfg);

// sigmoid(gen_w [state; h_ptr] + gen_b).
Var GenerationProb(Tape& tape, ParamStore& params, const Var& state, const Var& h_ptr);

// p_final(target) with the OOL-scaled generation probability, on the tape.
// p_mdl is 1 x V.
Var FinalProbability(const Var& p_mdl, const PointerOutput& ptr, const Var& p_gen, int target);

// Values of one scoring step.
struct StepOutput {
  std::vector<int> valid_pieces;
  // Valid pieces in order, then OOL.
  std::vector<double> p_ptr;
  std::vector<double> h_ptr;
  double p_gen = 0.0;
  double p_gen_scaled = 0.0;
  std::vector<double> p_final;

  double p_ool() const { return p_ptr.back(); }
};

// p_gen * (1 - p_ool).
double ScaledGenProb(double p_gen, double p_ool);

// Builds a StepOutput (without p_final) from the pointer values and p_gen.
StepOutput MakeStep(std::vector<int> valid_pieces, std::vector<double> p_ptr,
                    std::vector<double> h_ptr, double p_gen);

// p_final(y) = p_mdl(y) (1 - p_gen_scaled) + p_ptr(y) p_gen over the first
// `pieces` entries. Entries of p_mdl past the real pieces (the transducer
// blank) receive only the model term. OOL is not part of the output.
std::vector<double> Interpolate(std::span<const double> p_mdl, int pieces,
                                const StepOutput& step);

// Transducer blank handling: returns p_gen (1 - p_mdl(blank)).
double NtNullAdjust(std::span<const double> p_mdl, int null_id, double p_gen);

struct LmScores {
  std::vector<double> p_src;
  std::vector<double> p_tgt;
  double a1 = 0.0, b1 = 0.0, a2 = 0.0, b2 = 0.0;
};

enum class BlmdForm {
  // (1 - p_gen_scaled) on the model term, matching Interpolate().
  kConsistent,
  // (1 - p_gen) on the model term, as the discounting formula is printed.
  kLiteral,
};

inline constexpr double kLmFloor = 1e-12;

// Unnormalised biasing-driven LM discounting scores over the first
// `pieces` entries.
std::vector<double> BlmdScore(std::span<const double> p_mdl, int pieces,
                              const StepOutput& step, const LmScores& lm,
                              BlmdForm form = BlmdForm::kConsistent);

// Plain LM discounting: p_mdl(y) p_tgt(y)^alpha / p_src(y)^beta.
std::vector<double> LmDiscount(std::span<const double> p_mdl, int pieces,
                               std::span<const double> p_src, std::span<const double> p_tgt,
                               double alpha, double beta);

}  // namespace treebias

#endif  // TREEBIAS_SCORER_H_
