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

#include "treebias/scorer.h"

#include <algorithm>
#include <cmath>

#include "spdlog/spdlog.h"
#include "treebias/errors.h"

namespace treebias {

void InitScorerParams(ParamStore& params, const ScorerConfig& cfg, std::mt19937_64& rng) {
  if (cfg.state_dim <= 0 || cfg.embedding_dim <= 0 || cfg.encoding_dim <= 0 ||
      cfg.attention_dim <= 0) {
    throw DomainError("scorer widths must be positive");
  }
  params.Add("tcpgen.Wq", XavierUniform(cfg.attention_dim, cfg.state_dim + cfg.embedding_dim, rng));
  params.Add("tcpgen.WK", XavierUniform(cfg.attention_dim, cfg.encoding_dim, rng));
  params.Add("tcpgen.WV", XavierUniform(cfg.attention_dim, cfg.encoding_dim, rng));
  params.Add("tcpgen.ool", Gaussian(1, cfg.encoding_dim, 0.1, rng));
  params.Add("tcpgen.gen_w", XavierUniform(1, cfg.state_dim + cfg.attention_dim, rng));
  params.Add("tcpgen.gen_b", Tensor(1, 1, 0.0));
}

Var MakeQuery(Tape& tape, ParamStore& params, const Var& state, const Var& prev_emb) {
  const Var wq = tape.Param(params, "tcpgen.Wq");
  if (state.rows() != 1 || prev_emb.rows() != 1 ||
      state.cols() + prev_emb.cols() != wq.cols()) {
    throw DomainError("query input width does not match tcpgen.Wq");
  }
  const Var parts[] = {state, prev_emb};
  return ad::MatMulBT(ad::ConcatCols(parts), wq);
}

PointerOutput PtrDistribution(Tape& tape, ParamStore& params, const Var& query,
                              const Var& valid_encodings, std::vector<int> valid_pieces,
                              const ScorerConfig& cfg) {
  const Var wk = tape.Param(params, "tcpgen.WK");
  const Var wv = tape.Param(params, "tcpgen.WV");
  const Var ool = tape.Param(params, "tcpgen.ool");
  if (query.rows() != 1 || query.cols() != wk.rows()) {
    throw DomainError("query width does not match the key width");
  }
  Var rows = ool;
  if (!valid_pieces.empty()) {
    if (!valid_encodings.valid() || valid_encodings.rows() != int(valid_pieces.size())) {
      throw DomainError("valid encodings do not match the valid pieces");
    }
    const Var parts[] = {valid_encodings, ool};
    rows = ad::ConcatRows(parts);
  }
  const Var keys = ad::MatMulBT(rows, wk);
  const Var values = ad::MatMulBT(rows, wv);
  const Var logits =
      ad::Scale(ad::MatMulBT(query, keys), 1.0 / std::sqrt(double(wk.rows())));
  // Every gathered slot is a valid tree branch or OOL.
  const std::vector<bool> mask(rows.rows(), true);
  PointerOutput out;
  out.p_ptr = ad::MaskedSoftmax(logits, mask);
  Var weights = out.p_ptr;
  if (!cfg.ool_value_in_output) {
    Tensor keep(1, rows.rows(), 1.0);
    keep[rows.rows() - 1] = 0.0;
    weights = ad::Mul(out.p_ptr, tape.Constant(std::move(keep)));
  }
  out.h_ptr = ad::MatMul(weights, values);
  out.pieces = std::move(valid_pieces);
  return out;
}

Var GenerationProb(Tape& tape, ParamStore& params, const Var& state, const Var& h_ptr) {
  const Var w = tape.Param(params, "tcpgen.gen_w");
  const Var b = tape.Param(params, "tcpgen.gen_b");
  if (state.cols() + h_ptr.cols() != w.cols()) {
    throw DomainError("generation probability input width mismatch");
  }
  const Var parts[] = {state, h_ptr};
  return ad::Sigmoid(ad::Add(ad::MatMulBT(ad::ConcatCols(parts), w), b));
}

Var FinalProbability(const Var& p_mdl, const PointerOutput& ptr, const Var& p_gen, int target) {
  const Var p_ool = ad::Pick(ptr.p_ptr, 0, ptr.ool_slot());
  const Var scaled = ad::Mul(p_gen, ad::AddScalar(ad::Scale(p_ool, -1.0), 1.0));
  Var result =
      ad::Mul(ad::Pick(p_mdl, 0, target), ad::AddScalar(ad::Scale(scaled, -1.0), 1.0));
  auto it = std::find(ptr.pieces.begin(), ptr.pieces.end(), target);
  if (it != ptr.pieces.end()) {
    const int slot = static_cast<int>(it - ptr.pieces.begin());
    result = ad::Add(result, ad::Mul(ad::Pick(ptr.p_ptr, 0, slot), p_gen));
  }
  return result;
}

double ScaledGenProb(double p_gen, double p_ool) { return p_gen * (1.0 - p_ool); }

StepOutput MakeStep(std::vector<int> valid_pieces, std::vector<double> p_ptr,
                    std::vector<double> h_ptr, double p_gen) {
  if (p_ptr.size() != valid_pieces.size() + 1) {
    throw DomainError("pointer distribution must cover the valid pieces plus OOL");
  }
  StepOutput s;
  s.valid_pieces = std::move(valid_pieces);
  s.p_ptr = std::move(p_ptr);
  s.h_ptr = std::move(h_ptr);
  s.p_gen = p_gen;
  s.p_gen_scaled = ScaledGenProb(p_gen, s.p_ool());
  return s;
}

std::vector<double> Interpolate(std::span<const double> p_mdl, int pieces,
                                const StepOutput& step) {
  if (pieces < 0 || size_t(pieces) > p_mdl.size()) {
    throw DomainError("piece count exceeds the model distribution");
  }
  std::vector<double> out(p_mdl.size());
  const double keep = 1.0 - step.p_gen_scaled;
  for (size_t y = 0; y < p_mdl.size(); ++y) out[y] = p_mdl[y] * keep;
  for (size_t k = 0; k < step.valid_pieces.size(); ++k) {
    const int y = step.valid_pieces[k];
    if (y < 0 || y >= pieces) throw DomainError("valid piece outside the vocabulary");
    out[y] += step.p_ptr[k] * step.p_gen;
  }
  return out;
}

double NtNullAdjust(std::span<const double> p_mdl, int null_id, double p_gen) {
  if (null_id < 0 || size_t(null_id) >= p_mdl.size()) {
    throw DomainError("blank id outside the model distribution");
  }
  return p_gen * (1.0 - p_mdl[null_id]);
}

namespace {

double Discount(double p_src, double p_tgt, double alpha, double beta) {
  if (beta > 0.0 && p_src < kLmFloor) {
    static bool warned = false;
    if (!warned) {
      spdlog::warn("source LM probability below {} floored before discounting", kLmFloor);
      warned = true;
    }
    p_src = kLmFloor;
  }
  const double num = alpha == 0.0 ? 1.0 : std::pow(p_tgt, alpha);
  const double den = beta == 0.0 ? 1.0 : std::pow(p_src, beta);
  return num / den;
}

void CheckLm(std::span<const double> p_src, std::span<const double> p_tgt, int pieces) {
  if (p_src.size() < size_t(pieces) || p_tgt.size() < size_t(pieces)) {
    throw DomainError("LM distributions do not cover the vocabulary");
  }
}

}  // namespace

std::vector<double> BlmdScore(std::span<const double> p_mdl, int pieces,
                              const StepOutput& step, const LmScores& lm, BlmdForm form) {
  if (lm.a1 < 0 || lm.b1 < 0 || lm.a2 < 0 || lm.b2 < 0) {
    throw DomainError("discounting exponents must be non-negative");
  }
  CheckLm(lm.p_src, lm.p_tgt, pieces);
  const double model_weight =
      1.0 - (form == BlmdForm::kConsistent ? step.p_gen_scaled : step.p_gen);
  std::vector<double> ptr(pieces, 0.0);
  for (size_t k = 0; k < step.valid_pieces.size(); ++k) ptr[step.valid_pieces[k]] = step.p_ptr[k];
  std::vector<double> out(pieces);
  for (int y = 0; y < pieces; ++y) {
    out[y] = model_weight * p_mdl[y] * Discount(lm.p_src[y], lm.p_tgt[y], lm.a1, lm.b1);
    if (ptr[y] != 0.0) {
      out[y] += step.p_gen * ptr[y] * Discount(lm.p_src[y], lm.p_tgt[y], lm.a2, lm.b2);
    }
  }
  return out;
}

std::vector<double> LmDiscount(std::span<const double> p_mdl, int pieces,
                               std::span<const double> p_src, std::span<const double> p_tgt,
                               double alpha, double beta) {
  CheckLm(p_src, p_tgt, pieces);
  std::vector<double> out(pieces);
  for (int y = 0; y < pieces; ++y) out[y] = p_mdl[y] * Discount(p_src[y], p_tgt[y], alpha, beta);
  return out;
}

}  // namespace treebias
