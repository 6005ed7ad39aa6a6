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

#include "treebias/replay.h"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "treebias/errors.h"

namespace treebias {

namespace {

constexpr double kSumTolerance = 1e-6;

}  // namespace

std::vector<ReplayUtterance> LoadReplay(const std::filesystem::path& path, int vocab_size) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open replay file " + path.string());
  std::vector<ReplayUtterance> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      ReplayUtterance utt;
      utt.id = j.value("id", std::to_string(out.size()));
      utt.steps = j.at("steps").get<std::vector<std::vector<double>>>();
      if (j.contains("states")) utt.states = j.at("states").get<std::vector<std::vector<double>>>();
      if (j.contains("biasing")) utt.biasing = j.at("biasing").get<std::vector<std::string>>();
      if (j.contains("ref")) utt.ref = j.at("ref").get<std::string>();
      if (utt.steps.empty()) throw FormatError(where + "no steps");
      const size_t width = utt.steps.front().size();
      if (width != size_t(vocab_size) && width != size_t(vocab_size) + 1) {
        throw FormatError(where + "step width " + std::to_string(width) +
                          " does not match vocabulary size " + std::to_string(vocab_size));
      }
      for (const auto& step : utt.steps) {
        if (step.size() != width) throw FormatError(where + "ragged steps");
        double sum = 0.0;
        for (double p : step) {
          if (!(p >= 0.0) || !std::isfinite(p)) throw FormatError(where + "invalid probability");
          sum += p;
        }
        if (std::abs(sum - 1.0) > kSumTolerance) throw FormatError(where + "step does not sum to 1");
      }
      if (!utt.states.empty() && utt.states.size() != utt.steps.size()) {
        throw FormatError(where + "states and steps differ in length");
      }
      out.push_back(std::move(utt));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + e.what());
    }
  }
  return out;
}

ReplaySource::ReplaySource(const ReplayUtterance& utt, int vocab_size, int state_dim)
    : utt_(utt),
      vocab_size_(vocab_size),
      state_dim_(state_dim),
      width_(utt.steps.empty() ? vocab_size : static_cast<int>(utt.steps.front().size())) {
  for (const auto& s : utt_.states) {
    if (static_cast<int>(s.size()) != state_dim_) {
      throw FormatError("replay state width does not match the model");
    }
  }
}

Var ReplaySource::InitialCarry(Tape& tape) const { return tape.Constant(Tensor(1, 1)); }

PosteriorSource::Output ReplaySource::Step(Tape& tape, ParamStore&, const Var& carry, int,
                                           int t) const {
  if (t < 0 || t >= num_steps()) throw DomainError("step index out of range");
  Output out;
  out.probs = tape.Constant(Tensor::Row(utt_.steps[t]));
  out.state = utt_.states.empty() ? tape.Constant(Tensor(1, state_dim_))
                                  : tape.Constant(Tensor::Row(utt_.states[t]));
  out.carry = carry;
  return out;
}

}  // namespace treebias
