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

#include "treebias/beam_search.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "treebias/errors.h"

namespace treebias {

std::string DecodeModeName(DecodeMode mode) {
  switch (mode) {
    case DecodeMode::kPlain:
      return "plain";
    case DecodeMode::kTcpgen:
      return "tcpgen";
    case DecodeMode::kBlmd:
      return "blmd";
  }
  return "?";
}

DecodeMode ParseDecodeMode(const std::string& name) {
  if (name == "plain") return DecodeMode::kPlain;
  if (name == "tcpgen") return DecodeMode::kTcpgen;
  if (name == "blmd" || name == "tcpgen+blmd") return DecodeMode::kBlmd;
  throw DomainError("unknown decode mode '" + name + "'");
}

TraversalState ReplayTraversal(const PrefixTree& tree, const std::vector<int>& pieces) {
  TraversalState state;
  for (int p : pieces) state = Advance(tree, state, p);
  return state;
}

namespace {

struct Live {
  Hypothesis hyp;
  Var carry;
};

struct Candidate {
  double score;
  int hyp;
  int symbol;
};

double SafeLog(double p) {
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

}  // namespace

Hypothesis BeamSearch(const BiasedModel& model, ParamStore& params, const PosteriorSource& source,
                      const PrefixTree* tree, const DecodeConfig& cfg, const BlmdLms* lms) {
  if (cfg.beam < 1) throw DomainError("beam width must be at least 1");
  const bool pointer = cfg.mode != DecodeMode::kPlain;
  if (pointer && !model.tcpgen()) throw DomainError("model has no pointer generator");
  if (pointer && tree == nullptr) throw DomainError("biasing modes need a prefix tree");
  if (cfg.mode == DecodeMode::kBlmd && (lms == nullptr || !lms->source || !lms->target)) {
    throw DomainError("discounting mode needs source and target LMs");
  }
  const int pieces = model.base().config().vocab_size;
  const int width = source.output_size();
  if (width != pieces + (source.has_null() ? 1 : 0)) {
    throw DomainError("posterior width does not match the vocabulary");
  }
  const int null_id = pieces;
  const int bos = model.base().bos_id();

  Tape tape(false);
  TreeEncoding enc;
  if (pointer) enc = model.EncodeTree(tape, *tree, params);

  std::vector<Live> beam(1);
  beam[0].carry = source.InitialCarry(tape);
  beam[0].hyp.prev_token = bos;

  for (int t = 0; t < source.num_steps(); ++t) {
    std::vector<std::vector<double>> dists(beam.size());
    std::vector<std::vector<TraceStep>> traces(beam.size());
    std::vector<std::vector<double>> mdls(beam.size());
    std::vector<Var> carries(beam.size());
    std::vector<Candidate> cands;
    cands.reserve(beam.size() * width);
    for (size_t h = 0; h < beam.size(); ++h) {
      const Hypothesis& hyp = beam[h].hyp;
      const PosteriorSource::Output out =
          source.Step(tape, params, beam[h].carry, hyp.prev_token, t);
      carries[h] = out.carry;
      const std::vector<double> p_mdl = out.probs.value().values();
      std::vector<double> dist;
      StepOutput step;
      if (!pointer) {
        dist = p_mdl;
      } else {
        const BiasedModel::PointerStep ps =
            model.Point(tape, params, *tree, enc, hyp.traversal, out.state, hyp.prev_token);
        double p_gen = cfg.force_pgen_zero ? 0.0 : ps.p_gen.scalar();
        if (source.has_null()) p_gen = NtNullAdjust(p_mdl, null_id, p_gen);
        step = MakeStep(ps.ptr.pieces, ps.ptr.p_ptr.value().values(),
                        ps.ptr.h_ptr.value().values(), p_gen);
        dist = Interpolate(p_mdl, pieces, step);
        if (cfg.mode == DecodeMode::kBlmd) {
          const int ctx = hyp.prev_token;
          LmScores lm{lms->source->Distribution(ctx), lms->target->Distribution(ctx),
                      cfg.a1, cfg.b1, cfg.a2, cfg.b2};
          std::vector<double> scores = BlmdScore(p_mdl, pieces, step, lm, cfg.blmd_form);
          std::copy(scores.begin(), scores.end(), dist.begin());
        }
      }
      if (cfg.trace) {
        TraceStep ts;
        ts.t = t;
        ts.valid_pieces = step.valid_pieces;
        ts.p_gen = step.p_gen;
        ts.p_gen_scaled = step.p_gen_scaled;
        ts.p_ool = pointer ? step.p_ool() : 1.0;
        traces[h].push_back(ts);
      }
      for (int y = 0; y < width; ++y) cands.push_back({hyp.score + SafeLog(dist[y]), int(h), y});
      dists[h] = std::move(dist);
      if (cfg.trace) mdls[h] = p_mdl;
    }
    const size_t keep = std::min<size_t>(cfg.beam, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(),
                      [](const Candidate& a, const Candidate& b) {
                        if (a.score != b.score) return a.score > b.score;
                        if (a.hyp != b.hyp) return a.hyp < b.hyp;
                        return a.symbol < b.symbol;
                      });
    std::vector<Live> next;
    next.reserve(keep);
    for (size_t k = 0; k < keep; ++k) {
      const Candidate& c = cands[k];
      Live live;
      live.hyp = beam[c.hyp].hyp;
      live.carry = carries[c.hyp];
      Hypothesis& hyp = live.hyp;
      hyp.score = c.score;
      if (cfg.trace) {
        TraceStep ts = traces[c.hyp].front();
        ts.emitted = c.symbol;
        ts.p_final = dists[c.hyp][c.symbol];
        ts.p_mdl = mdls[c.hyp][c.symbol];
        hyp.trace.push_back(std::move(ts));
      }
      if (!(source.has_null() && c.symbol == null_id)) {
        hyp.pieces.push_back(c.symbol);
        hyp.prev_token = c.symbol;
        if (tree != nullptr) hyp.traversal = Advance(*tree, hyp.traversal, c.symbol);
      }
#ifndef NDEBUG
      if (tree != nullptr) assert(hyp.traversal == ReplayTraversal(*tree, hyp.pieces));
#endif
      next.push_back(std::move(live));
    }
    beam = std::move(next);
  }
  Hypothesis best = std::move(beam.front().hyp);
  best.carry = beam.front().carry.value();
  return best;
}

}  // namespace treebias
